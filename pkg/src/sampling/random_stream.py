"""Counter-based random streams with deterministic per-replica derivation."""

from typing import Iterable

import numpy as np
from scipy.special import ndtri

MASK_64b = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
GENERATOR_NAME = "philox4x64-10/splitmix64/ndtri53"

_TWO_POW_MINUS_53 = 2.0 ** -53


def splitmix64(z: int) -> int:
    """SplitMix64 output finalizer (Stafford variant 13)."""
    z &= MASK_64b
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK_64b
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK_64b
    return z ^ (z >> 31)


def mix_seed(seed: int, index: int) -> int:
    """
    Derive the seed of child stream ``index`` from ``seed``.

    mix(seed, i) = splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15 mod 2^64).
    The child depends only on (seed, index), never on scheduling.
    """
    if index < 0:
        raise ValueError(f"stream index must be non-negative, got {index}")
    return splitmix64((seed & MASK_64b) + (index + 1) * GOLDEN_GAMMA)


class RandomStream:
    """
    A Philox stream keyed by a 64-bit seed.

    Gaussian deviates come from the inverse normal CDF applied to 53-bit
    uniforms in (0, 1), so every draw consumes exactly one raw 64-bit output.
    """

    generator_name = GENERATOR_NAME

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK_64b
        self._bitgen = np.random.Philox(key=self.seed)

    def spawn(self, index: int) -> "RandomStream":
        """Independent child stream for replica ``index``."""
        return RandomStream(mix_seed(self.seed, index))

    def child(self, *path: int) -> "RandomStream":
        """Nested derivation, e.g. ``stream.child(level, replica)``."""
        stream = self
        for index in path:
            stream = stream.spawn(index)
        return stream

    def spawn_many(self, indices: Iterable[int]) -> list:
        return [self.spawn(i) for i in indices]

    def uniforms(self, size: int) -> np.ndarray:
        raw = self._bitgen.random_raw(size)
        top = (raw >> np.uint64(11)).astype(np.float64)
        return (top + 0.5) * _TWO_POW_MINUS_53

    def normals(self, size: int) -> np.ndarray:
        return ndtri(self.uniforms(size))

    def __repr__(self) -> str:
        return f"RandomStream(seed=0x{self.seed:016x})"
