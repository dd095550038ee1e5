"""On-disk cache of frozen Hermite-limit reference samples."""

import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import structlog
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from src.config import ReferenceConfig, load_config
from src.errors import ReferenceSampleError

logger = structlog.get_logger(__name__)

MAGIC = b"HERMREF1"
# magic, q, H, log2(m_path), pad, m, seed
HEADER = struct.Struct("<8sHdBxIQ")
assert HEADER.size == 32


@dataclass(frozen=True)
class ReferenceKey:
    """Identifies one reference sample file."""
    q: int
    hurst: float
    m_path: int
    m: int
    seed: int

    def __post_init__(self):
        if self.m_path < 1 or self.m_path & (self.m_path - 1):
            raise ReferenceSampleError("m_path must be a power of two", m_path=self.m_path)
        if self.m < 1:
            raise ReferenceSampleError("reference sample needs m >= 1", m=self.m)

    @property
    def filename(self) -> str:
        return f"hermref_q{self.q}_H{self.hurst!r}_p{self.m_path}_m{self.m}_s{self.seed:x}.bin"

    def header(self) -> bytes:
        return HEADER.pack(MAGIC, self.q, self.hurst, self.m_path.bit_length() - 1, self.m, self.seed)


def parse_header(raw: bytes) -> ReferenceKey:
    if len(raw) < HEADER.size:
        raise ReferenceSampleError("reference file shorter than its header", size=len(raw))
    magic, q, hurst, log2_path, m, seed = HEADER.unpack(raw[: HEADER.size])
    if magic != MAGIC:
        raise ReferenceSampleError("bad reference file magic", magic=magic.hex())
    return ReferenceKey(q=q, hurst=hurst, m_path=1 << log2_path, m=m, seed=seed)


class ReferenceCache:
    """Reads and atomically writes reference sample files under one directory."""

    def __init__(self, config: Optional[ReferenceConfig] = None, cache_dir: Optional[str] = None):
        self.config = config or load_config().reference
        self.directory = Path(cache_dir or self.config.cache_dir)

    def path_for(self, key: ReferenceKey) -> Path:
        return self.directory / key.filename

    @retry(
        stop=stop_after_attempt(3),
        wait=wait_exponential(multiplier=1, min=1, max=10),
        retry=retry_if_exception_type(OSError),
        reraise=True,
    )
    def load(self, key: ReferenceKey) -> Optional[np.ndarray]:
        """Sorted reference values for ``key``, or None when the file does not exist."""
        path = self.path_for(key)
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            logger.info("reference_cache_miss", path=str(path))
            return None

        stored = parse_header(raw)
        if stored != key:
            raise ReferenceSampleError(
                "reference file header does not match the request",
                path=str(path), stored=stored.filename, requested=key.filename,
            )
        payload = raw[HEADER.size:]
        if len(payload) != 8 * key.m:
            raise ReferenceSampleError(
                "reference file is truncated", path=str(path), expected=8 * key.m, found=len(payload)
            )
        values = np.frombuffer(payload, dtype="<f8").astype(np.float64)
        logger.info("reference_cache_hit", path=str(path), m=key.m)
        return values

    @retry(
        stop=stop_after_attempt(3),
        wait=wait_exponential(multiplier=1, min=1, max=10),
        retry=retry_if_exception_type(OSError),
        reraise=True,
    )
    def save(self, key: ReferenceKey, values: np.ndarray) -> Path:
        """Write to a temporary file in the cache directory and rename it into place."""
        values = np.asarray(values, dtype="<f8")
        if values.shape != (key.m,):
            raise ReferenceSampleError("sample size does not match the key", expected=key.m, found=values.size)

        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(key)
        fd, tmp = tempfile.mkstemp(prefix=".hermref-", dir=self.directory)
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(key.header())
                handle.write(values.tobytes())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        logger.info("reference_cache_written", path=str(path), m=key.m)
        return path
