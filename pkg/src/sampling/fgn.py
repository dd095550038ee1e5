"""Exact synthesis of standardized fractional Gaussian noise and fBm paths."""

import threading
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy.linalg import toeplitz
from scipy.special import binom

from src.config import SamplingConfig, load_config
from src.errors import FbmVarError, SynthesisError
from .random_stream import RandomStream

logger = structlog.get_logger(__name__)

# Below this lag the closed form is accurate to ~k^2 ulps; above it the
# binomial expansion in 1/k^2 avoids the cancellation of the k^{2H} terms.
_SERIES_LAG = 8
_SERIES_TERMS = 12

# Global embedding table, keyed by (H, M); entries are read-only once stored.
_embedding_cache: Dict[Tuple[float, int], "CirculantEmbedding"] = {}
_embedding_lock = threading.Lock()


def validate_hurst(hurst: float) -> float:
    hurst = float(hurst)
    if not 0.0 < hurst < 1.0:
        raise FbmVarError(f"Hurst index must lie in (0, 1), got {hurst}", hurst=hurst)
    return hurst


@dataclass(frozen=True)
class PathSpec:
    """Number of increments, Hurst index and master seed of one path."""
    n: int
    hurst: float
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise FbmVarError(f"path length must be a positive integer, got {self.n}", n=self.n)
        validate_hurst(self.hurst)
        if not 0 <= self.seed <= 0xFFFFFFFFFFFFFFFF:
            raise FbmVarError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class FgnSample:
    """Standardized increments n^H (B_{(k+1)/n} - B_{k/n}), k = 0..n-1."""
    increments: np.ndarray
    hurst: float

    @property
    def n(self) -> int:
        return int(self.increments.shape[0])

    def __neg__(self) -> "FgnSample":
        return FgnSample(-self.increments, self.hurst)


def fgn_autocovariances(hurst: float, max_lag: int) -> np.ndarray:
    """rho_H(k) for k = 0..max_lag as an array."""
    hurst = validate_hurst(hurst)
    k = np.arange(max_lag + 1, dtype=np.float64)
    two_h = 2.0 * hurst
    rho = 0.5 * (np.abs(k + 1.0) ** two_h + np.abs(k - 1.0) ** two_h - 2.0 * k ** two_h)

    far = k >= _SERIES_LAG
    if np.any(far):
        kf = k[far]
        inv_sq = kf ** -2.0
        acc = np.zeros_like(kf)
        power = np.ones_like(kf)
        for m in range(1, _SERIES_TERMS + 1):
            power = power * inv_sq
            acc += binom(two_h, 2 * m) * power
        rho[far] = kf ** two_h * acc
    rho[0] = 1.0
    return rho


def fgn_autocovariance(hurst: float, k: int) -> float:
    """rho_H(k) = 1/2 ((k+1)^{2H} + (k-1)^{2H} - 2 k^{2H}); rho_H(0) = 1."""
    if k < 0:
        raise FbmVarError(f"lag must be non-negative, got {k}", k=k)
    return float(fgn_autocovariances(hurst, int(k))[int(k)])


def fbm_covariance(hurst: float, s: float, t: float) -> float:
    """R^H(t, s) = 1/2 (t^{2H} + s^{2H} - |t - s|^{2H})."""
    hurst = validate_hurst(hurst)
    if s < 0 or t < 0:
        raise FbmVarError("fBm covariance is defined for s, t >= 0", s=s, t=t)
    two_h = 2.0 * hurst
    return 0.5 * (t ** two_h + s ** two_h - abs(t - s) ** two_h)


def embedding_half_size(n: int) -> int:
    """Smallest power of two M >= n."""
    return 1 << max(0, int(n - 1).bit_length())


@dataclass(frozen=True)
class CirculantEmbedding:
    """Eigenvalue table of the 2M circulant embedding of the fGn covariance."""
    hurst: float
    half_size: int
    first_row: np.ndarray
    eigenvalues: np.ndarray  # rfft of the first row, length M + 1
    weights: np.ndarray      # per-frequency synthesis amplitudes

    @property
    def size(self) -> int:
        return 2 * self.half_size

    @property
    def is_valid(self) -> bool:
        return self.weights.size > 0


def circulant_embedding(hurst: float, n: int, config: Optional[SamplingConfig] = None) -> CirculantEmbedding:
    """Build (or fetch from the shared table) the embedding used for paths of length n."""
    config = config or load_config().sampling
    hurst = validate_hurst(hurst)
    half = embedding_half_size(n)
    key = (hurst, half)

    cached = _embedding_cache.get(key)
    if cached is not None:
        return cached

    with _embedding_lock:
        cached = _embedding_cache.get(key)
        if cached is not None:
            return cached

        rho = fgn_autocovariances(hurst, half)
        row = np.concatenate([rho, rho[half - 1:0:-1]])
        eig = np.fft.rfft(row).real
        tol = config.eigen_tolerance * float(np.max(eig))
        size = 2 * half

        if np.min(eig) < -tol:
            logger.warning(
                "circulant_embedding_negative",
                hurst=hurst, half_size=half, min_eigenvalue=float(np.min(eig)),
            )
            weights = np.empty(0)
        else:
            lam = np.clip(eig, 0.0, None)
            weights = np.sqrt(lam / (2.0 * size))
            weights[0] = np.sqrt(lam[0] / size)
            weights[half] = np.sqrt(lam[half] / size)

        for array in (rho, row, eig, weights):
            array.setflags(write=False)
        embedding = CirculantEmbedding(hurst, half, row, eig, weights)
        _embedding_cache[key] = embedding
        logger.debug("circulant_embedding_created", hurst=hurst, half_size=half)
        return embedding


def normals_per_path(n: int, hurst: float, config: Optional[SamplingConfig] = None) -> int:
    embedding = circulant_embedding(hurst, n, config)
    return embedding.size if embedding.is_valid else n


def _synthesize_circulant(embedding: CirculantEmbedding, normals: np.ndarray, n: int) -> np.ndarray:
    half = embedding.half_size
    size = embedding.size
    w = np.empty((normals.shape[0], half + 1), dtype=np.complex128)
    weights = embedding.weights
    w[:, 0] = weights[0] * normals[:, 0]
    w[:, half] = weights[half] * normals[:, 1]
    if half > 1:
        w[:, 1:half] = weights[1:half] * (normals[:, 2::2] + 1j * normals[:, 3::2])
    return size * np.fft.irfft(w, n=size, axis=1)[:, :n]


def _dense_factor(hurst: float, n: int, config: SamplingConfig) -> np.ndarray:
    if n > config.dense_fallback_max_n:
        raise SynthesisError(
            "circulant embedding failed and n exceeds the dense fallback limit",
            hurst=hurst, n=n, limit=config.dense_fallback_max_n,
        )
    cov = toeplitz(fgn_autocovariances(hurst, n - 1))
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        eig, vec = np.linalg.eigh(cov)
        if eig.min() < -config.eigen_tolerance * eig.max():
            raise SynthesisError(
                "fGn covariance is not positive semidefinite",
                hurst=hurst, n=n, min_eigenvalue=float(eig.min()),
            )
        return vec * np.sqrt(np.clip(eig, 0.0, None))


def sample_fgn_batch(
    n: int,
    hurst: float,
    streams: Sequence[RandomStream],
    config: Optional[SamplingConfig] = None,
) -> np.ndarray:
    """
    Draw one exact fGn path of length n per stream.

    Args:
        n: Number of increments
        hurst: Hurst index
        streams: One stream per replica; replica r only reads streams[r]
        config: Sampling configuration

    Returns:
        Array of shape (len(streams), n)
    """
    config = config or load_config().sampling
    embedding = circulant_embedding(hurst, n, config)

    if embedding.is_valid:
        normals = np.stack([s.normals(embedding.size) for s in streams])
        return _synthesize_circulant(embedding, normals, n)

    logger.warning("circulant_embedding_fallback", hurst=hurst, n=n)
    factor = _dense_factor(hurst, n, config)
    normals = np.stack([s.normals(n) for s in streams])
    return normals @ factor.T


def sample_fgn(spec: PathSpec, rng: Union[RandomStream, None] = None,
               config: Optional[SamplingConfig] = None) -> FgnSample:
    """One exact draw of the standardized increments for ``spec``."""
    rng = rng or RandomStream(spec.seed)
    increments = sample_fgn_batch(spec.n, spec.hurst, [rng], config)[0]
    return FgnSample(increments, spec.hurst)


def fbm_path(sample: FgnSample) -> np.ndarray:
    """Path values B_{k/n}, k = 0..n, rebuilt from standardized increments."""
    path = np.empty(sample.n + 1)
    path[0] = 0.0
    np.cumsum(sample.increments, out=path[1:])
    return path * float(sample.n) ** -sample.hurst


def sample_fbm(spec: PathSpec, rng: Union[RandomStream, None] = None,
               config: Optional[SamplingConfig] = None) -> np.ndarray:
    """Path values B_{k/n}, k = 0..n, with B_0 = 0."""
    return fbm_path(sample_fgn(spec, rng, config))
