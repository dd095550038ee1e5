"""Kolmogorov-distance convergence rates of the normalized variations."""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy import stats

from src.config import Config, load_config
from src.errors import DegenerateFit, RegimeError
from src.sampling import validate_hurst
from src.variations import Regime, normalization_constants, validate_order, variation_draws
from .tails import EmpiricalSample, ks_distance, ks_stderr, ks_two_sample

logger = structlog.get_logger(__name__)


def rate_breakpoints(q: int) -> Tuple[float, float]:
    """H values where the CLT-regime rate switches branch: 1/2 and (2q-3)/(2q-2)."""
    q = validate_order(q, minimum=2)
    return 0.5, (2.0 * q - 3.0) / (2.0 * q - 2.0)


def rate_exponent(q: int, hurst: float) -> float:
    """
    Exponent e with sup_x |P(Z_n > x) - P(Z > x)| <= C n^e.

    CLT regime: -1/2 on (0, 1/2], H - 1 on [1/2, (2q-3)/(2q-2)),
    qH - q + 1/2 on [(2q-3)/(2q-2), 1 - 1/(2q)). Hermite regime: 1 - 1/(2q) - H.
    """
    q = validate_order(q)
    hurst = validate_hurst(hurst)
    if not Regime.of(q, hurst).is_clt:
        return 1.0 - 1.0 / (2.0 * q) - hurst
    if hurst <= 0.5:
        return -0.5
    if q >= 2 and hurst < (2.0 * q - 3.0) / (2.0 * q - 2.0):
        return hurst - 1.0
    return q * hurst - q + 0.5


@dataclass(frozen=True)
class RateBound:
    q: int
    hurst: float
    exponent: float

    @classmethod
    def of(cls, q: int, hurst: float) -> "RateBound":
        return cls(q, hurst, rate_exponent(q, hurst))


def exponent_continuity_gaps(q: int) -> Dict[str, float]:
    """Jumps of the CLT-regime exponent at its two breakpoints (zero when continuous)."""
    low, mid = rate_breakpoints(q)
    return {
        "at_half": abs(-0.5 - (low - 1.0)),
        "at_middle": abs((mid - 1.0) - (q * mid - q + 0.5)),
    }


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    stderr: float
    intercept: float


def fit_rate_slope(ks_values: Mapping[int, float]) -> SlopeFit:
    """
    Least-squares slope of log KS against log n.

    Raises:
        DegenerateFit: with fewer than four points or any KS value equal to zero.
    """
    if len(ks_values) < 4:
        raise DegenerateFit("slope fit needs at least four grid points", points=len(ks_values))
    ns = sorted(ks_values)
    ks = np.array([ks_values[n] for n in ns], dtype=np.float64)
    if np.any(ks <= 0.0):
        raise DegenerateFit("KS distance is zero on the grid", grid=ns)

    fit = stats.linregress(np.log(np.asarray(ns, dtype=np.float64)), np.log(ks))
    return SlopeFit(slope=float(fit.slope), stderr=float(fit.stderr), intercept=float(fit.intercept))


@dataclass(frozen=True)
class RatePoint:
    n: int
    ks: float
    stderr: float
    predicted_exponent: float


def normalized_variation_draws(
    q: int,
    hurst: float,
    n_grid: Sequence[int],
    replicas: int,
    seed: int,
    config: Optional[Config] = None,
) -> Dict[int, np.ndarray]:
    """Z_n^(1) or Z_n^(2) draws for each n, all read off the same replica paths."""
    config = config or load_config()
    regime = Regime.of(q, hurst)
    consts = normalization_constants(q, hurst, config.constants)
    scale = consts.scale(regime)
    grid = sorted(set(int(n) for n in n_grid))
    v = variation_draws(q, hurst, grid, replicas, seed, config=config.sampling)
    return {n: v[:, i] / (scale * regime.normalizer(n)) for i, n in enumerate(grid)}


def kolmogorov_rates(
    q: int,
    hurst: float,
    n_grid: Optional[Sequence[int]] = None,
    replicas: Optional[int] = None,
    seed: int = 0,
    reference: Optional[EmpiricalSample] = None,
    config: Optional[Config] = None,
) -> List[RatePoint]:
    """
    KS distance of the normalized variations to their limit on an n-grid.

    The CLT regime compares with the standard normal CDF; the Hermite regime
    compares with the reference sample by the two-sample statistic.
    """
    config = config or load_config()
    n_grid = n_grid or config.rates.n_grid
    replicas = replicas or config.rates.replicas
    regime = Regime.of(q, hurst)
    if not regime.is_clt and reference is None:
        raise RegimeError("Hermite-regime rates need a reference sample", q=q, hurst=hurst)

    exponent = rate_exponent(q, hurst)
    draws = normalized_variation_draws(q, hurst, n_grid, replicas, seed, config)
    points = []
    for n, z in draws.items():
        if regime.is_clt:
            ks = ks_distance(z, "norm")
            stderr = ks_stderr(replicas)
        else:
            ks = ks_two_sample(z, reference)
            effective = max(1, round(replicas * reference.m / (replicas + reference.m)))
            stderr = ks_stderr(effective)
        points.append(RatePoint(n=n, ks=ks, stderr=stderr, predicted_exponent=exponent))
        logger.debug("rate_point", n=n, ks=ks, stderr=stderr)
    return points

