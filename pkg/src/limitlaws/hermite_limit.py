"""Surrogate draws of the Hermite limit Z^(2) and the frozen reference sample."""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import structlog

from src.config import Config, load_config
from src.errors import RegimeError
from src.sampling import RandomStream, validate_hurst
from src.storage.reference_cache import ReferenceCache, ReferenceKey
from src.variations import (
    NormalizationConstants,
    Regime,
    growth_exponent,
    normalization_constants,
    validate_order,
    variation_block,
    variation_draws,
)
from .tails import EmpiricalSample

logger = structlog.get_logger(__name__)


def surrogate_error_exponent(q: int, hurst: float) -> float:
    """L2 distance of Z_m^(2) to Z^(2) is O(m^{1 - 1/(2q) - H})."""
    return 1.0 - 1.0 / (2.0 * q) - hurst


def limit_scaling(q: int, hurst: float, consts: Optional[NormalizationConstants] = None) -> Tuple[float, float]:
    """
    (c, alpha) such that Z_m^(2) = V_m / (c m^alpha).

    First-chaos variations are exactly Gaussian with variance m^{2H}, so
    q = 1 uses (1, H) for every H.

    Raises:
        RegimeError: if q >= 2 and H <= 1 - 1/(2q).
    """
    q = validate_order(q)
    hurst = validate_hurst(hurst)
    if q == 1:
        return 1.0, hurst
    if Regime.of(q, hurst).is_clt:
        raise RegimeError("Hermite limit draws need H > 1 - 1/(2q)", q=q, hurst=hurst)
    consts = consts or normalization_constants(q, hurst)
    return consts.c2, growth_exponent(q, hurst)


def sample_hermite_limit(
    q: int,
    hurst: float,
    m_path: int,
    rng: RandomStream,
    consts: Optional[NormalizationConstants] = None,
    config: Optional[Config] = None,
) -> float:
    """One draw of Z_{m_path}^(2) from the stream ``rng``."""
    config = config or load_config()
    scale, alpha = limit_scaling(q, hurst, consts)
    prefixes = variation_block(q, hurst, m_path, [rng], config.sampling)
    return float(prefixes[0, -1] / (scale * float(m_path) ** alpha))


@dataclass(frozen=True)
class HermiteLimitDraws:
    """Replicated Z_{m_path}^(2) draws with their provenance."""
    values: np.ndarray
    q: int
    hurst: float
    m_path: int
    seed: int

    @property
    def surrogate_exponent(self) -> float:
        return surrogate_error_exponent(self.q, self.hurst)

    def to_sample(self) -> EmpiricalSample:
        return EmpiricalSample.from_draws(self.values, **self.metadata())

    def metadata(self) -> dict:
        return {
            "q": self.q,
            "hurst": self.hurst,
            "n_or_limit": self.m_path,
            "seed": self.seed,
            "surrogate_error_exponent": self.surrogate_exponent,
        }


def sample_hermite_limit_batch(
    q: int,
    hurst: float,
    m_path: int,
    m: int,
    seed: int,
    consts: Optional[NormalizationConstants] = None,
    config: Optional[Config] = None,
) -> HermiteLimitDraws:
    """
    ``m`` draws of Z_{m_path}^(2); draw r equals
    ``sample_hermite_limit(q, H, m_path, RandomStream(seed).spawn(r))``.
    """
    config = config or load_config()
    scale, alpha = limit_scaling(q, hurst, consts)
    v = variation_draws(q, hurst, [m_path], m, seed, config=config.sampling)[:, 0]
    values = v / (scale * float(m_path) ** alpha)
    return HermiteLimitDraws(values, q, hurst, m_path, seed)


def reference_sample(
    q: int,
    hurst: float,
    config: Optional[Config] = None,
    cache: Optional[ReferenceCache] = None,
) -> EmpiricalSample:
    """
    The frozen high-resolution sample standing in for the law of Z^(2).

    Generated once per (q, H, m_path, m, seed) and cached on disk; later calls
    read the cached file.
    """
    config = config or load_config()
    ref = config.reference
    cache = cache or ReferenceCache(ref)
    key = ReferenceKey(q=validate_order(q), hurst=validate_hurst(hurst), m_path=ref.m_path, m=ref.m, seed=ref.seed)

    values = cache.load(key)
    if values is None:
        logger.info("reference_sample_build", q=q, hurst=hurst, m_path=ref.m_path, m=ref.m)
        draws = sample_hermite_limit_batch(q, hurst, ref.m_path, ref.m, ref.seed, config=config)
        values = np.sort(draws.values)
        cache.save(key, values)

    return EmpiricalSample.from_draws(
        values,
        q=q,
        hurst=hurst,
        n_or_limit=ref.m_path,
        seed=ref.seed,
        surrogate_error_exponent=surrogate_error_exponent(q, hurst),
    )


def sample_moments(values: np.ndarray) -> dict:
    """Variance and skewness with their large-sample standard errors."""
    values = np.asarray(values, dtype=np.float64)
    m = values.size
    centered = values - values.mean()
    var = float(np.mean(centered ** 2) * m / (m - 1))
    fourth = float(np.mean(centered ** 4))
    skew = float(np.mean(centered ** 3) / var ** 1.5)
    return {
        "variance": var,
        "variance_stderr": math.sqrt(max(fourth - var ** 2, 0.0) / m),
        "skewness": skew,
        "skewness_stderr": math.sqrt(6.0 / m),
    }
