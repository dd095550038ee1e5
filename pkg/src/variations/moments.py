"""Exact second moment of V_n and the normalization constants c1, c2."""

import math
import threading
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.special import binom, zeta

from src.config import ConstantsConfig, load_config
from src.errors import FbmVarError, RegimeError
from src.sampling.fgn import fgn_autocovariances, validate_hurst
from .hermite import validate_order
from .statistic import Regime, growth_exponent

logger = structlog.get_logger(__name__)

_constants_cache: Dict[Tuple[int, float], "NormalizationConstants"] = {}
_constants_lock = threading.Lock()


@dataclass(frozen=True)
class NormalizationConstants:
    """c1 (CLT regime) or c2 (Hermite regime) with certified absolute errors."""
    q: int
    hurst: float
    c1: Optional[float] = None
    c2: Optional[float] = None
    err1: Optional[float] = None
    err2: Optional[float] = None

    @property
    def regime(self) -> Regime:
        return Regime.of(self.q, self.hurst)

    def scale(self, regime: Regime) -> float:
        value = self.c1 if regime.is_clt else self.c2
        if value is None:
            raise RegimeError(
                "normalization constant for this regime is absent",
                q=self.q, hurst=self.hurst, regime=regime.tag.value,
            )
        return value

    def to_dict(self) -> dict:
        regime = self.regime
        if regime.is_clt:
            return {"regime": regime.tag.value, "q": self.q, "hurst": self.hurst,
                    "c1": self.c1, "certified_error": self.err1}
        return {"regime": regime.tag.value, "q": self.q, "hurst": self.hurst,
                "c2": self.c2, "certified_error": self.err2, "closed_form": c2_closed_form(self.q, self.hurst)}


def _rho_powers(q: int, hurst: float, max_lag: int) -> np.ndarray:
    return fgn_autocovariances(hurst, max_lag) ** q


def exact_second_moment(q: int, hurst: float, n: int) -> float:
    """E[V_n^2] = q! sum_{|k|<n} (n - |k|) rho_H(k)^q, by direct folded summation."""
    q = validate_order(q)
    hurst = validate_hurst(hurst)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    r = _rho_powers(q, hurst, n - 1)
    k = np.arange(1, n, dtype=np.float64)
    folded = math.fsum((2.0 * (n - k)) * r[1:])
    return math.factorial(q) * math.fsum([n * r[0], folded])


def exact_second_moment_bruteforce(q: int, hurst: float, n: int) -> float:
    """O(n^2) double sum over (k, l) of q! rho_H(k - l)^q; oracle for the folded sum."""
    q = validate_order(q)
    r = _rho_powers(q, validate_hurst(hurst), max(n - 1, 0))
    idx = np.arange(n)
    grid = r[np.abs(idx[:, None] - idx[None, :])]
    return math.factorial(q) * math.fsum(grid.ravel())


def _leading_coefficients(q: int, hurst: float) -> Tuple[float, float, float]:
    """
    Coefficients of rho_H(k)^q k^{q(2-2H)} = a + b k^-2 + c k^-4 + O(k^-6).

    rho_H(k) = k^{2H} sum_{m>=1} binom(2H, 2m) k^{-2m}.
    """
    b1, b2, b3 = (float(binom(2.0 * hurst, 2 * m)) for m in (1, 2, 3))
    a = b1 ** q
    b = q * b1 ** (q - 1) * b2
    c = q * b1 ** (q - 1) * b3 + (q * (q - 1) / 2.0) * b1 ** (q - 2) * b2 ** 2 if q >= 2 else b3
    return a, b, c


def _rho_power_tail(q: int, hurst: float, start: int) -> Tuple[float, float]:
    """
    sum_{k >= start} rho_H(k)^q via Hurwitz zeta, with an error bound.

    Two expansion terms are summed exactly; the remainder is bounded by twice
    the third term's sum.
    """
    s = q * (2.0 - 2.0 * hurst)
    a, b, c = _leading_coefficients(q, hurst)
    tail = a * zeta(s, start) + b * zeta(s + 2.0, start)
    bound = 2.0 * abs(c) * zeta(s + 4.0, start)
    return float(tail), float(bound)


def _absolute_rho_sum(q: int, hurst: float, terms: int) -> Tuple[float, float]:
    """sum_{k in Z} |rho_H(k)|^q and a bound on the neglected tail (CLT regime only)."""
    r = np.abs(fgn_autocovariances(hurst, terms - 1)) ** q
    head = math.fsum([r[0], 2.0 * math.fsum(r[1:])])
    tail, bound = _rho_power_tail(q, hurst, terms)
    return head + 2.0 * abs(tail), 2.0 * bound


def c1_constant(q: int, hurst: float, config: Optional[ConstantsConfig] = None) -> Tuple[float, float]:
    """
    c1 = sqrt(q! sum_{k in Z} rho_H(k)^q) with a certified absolute error.

    Lags below K are summed directly; the tail uses the expansion
    rho_H(k)^q = k^{-s}(a + b k^-2 + O(k^-4)), s = q(2 - 2H), summed with
    Hurwitz zeta functions.

    Raises:
        RegimeError: if H >= 1 - 1/(2q) or the constant degenerates to zero.
    """
    config = config or load_config().constants
    q = validate_order(q)
    hurst = validate_hurst(hurst)
    if not Regime.of(q, hurst).is_clt:
        raise RegimeError("c1 exists only for H < 1 - 1/(2q)", q=q, hurst=hurst)
    if q == 1:
        # sum_Z rho_H(k) telescopes to zero: V_n = B_n has variance n^{2H}.
        raise RegimeError(
            "long-run variance vanishes for q = 1; V_n has no sqrt(n) scaling",
            q=q, hurst=hurst,
        )

    terms = config.c1_direct_terms
    r = _rho_powers(q, hurst, terms - 1)
    head = math.fsum([r[0], 2.0 * math.fsum(r[1:])])
    tail, bound = _rho_power_tail(q, hurst, terms)
    total = math.fsum([head, 2.0 * tail])
    variance = math.factorial(q) * total
    c1 = math.sqrt(variance)
    rounding = 4.0 * terms * np.finfo(float).eps * variance
    err = (math.factorial(q) * 2.0 * bound + rounding) / (2.0 * c1)
    if err > config.c1_target_error:
        logger.warning("c1_error_above_target", q=q, hurst=hurst, certified_error=err)
    return c1, err


C2_WINDOW = 5


def _c2_squared_fit(ns: np.ndarray, values: np.ndarray, s: float) -> float:
    """
    Constant term of a + b n^{-(1-s)} + c n^{-(2-s)} fitted by least squares.

    E[V_n^2] = q![2 a_H^q n^{2-s}/((1-s)(2-s)) + B n + C + O(n^{-s})], so after
    dividing by n^{2-s} the first neglected term is O(n^-2).
    """
    design = np.column_stack([np.ones_like(ns), ns ** -(1.0 - s), ns ** -(2.0 - s)])
    design /= np.max(np.abs(design), axis=0)
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    return float(coeffs[0])


def c2_constant(
    q: int,
    hurst: float,
    grid_exponents: Optional[Sequence[int]] = None,
    config: Optional[ConstantsConfig] = None,
) -> Tuple[float, float]:
    """
    c2 = lim n^{-(1 - q(1-H))} sqrt(E V_n^2) by deterministic extrapolation.

    The correction terms of n^{-(2-s)} E[V_n^2], s = q(2 - 2H), are fitted on
    the top ``C2_WINDOW`` points of the dyadic grid. The error is the change
    of c2 when the window slides down one octave plus a rounding allowance.
    The neglected O(n^-2) term shrinks fourfold per octave, so the change
    bounds the error of the top window and falls as the grid grows.

    Raises:
        RegimeError: if H <= 1 - 1/(2q).
        FbmVarError: if the grid has fewer than four points.
    """
    config = config or load_config().constants
    q = validate_order(q)
    hurst = validate_hurst(hurst)
    if Regime.of(q, hurst).is_clt:
        raise RegimeError("c2 exists only for H > 1 - 1/(2q)", q=q, hurst=hurst)

    exponents = sorted(grid_exponents or config.c2_grid_exponents)
    if len(exponents) < 4:
        raise FbmVarError("c2 extrapolation needs at least four grid points", grid=exponents)
    width = min(C2_WINDOW, len(exponents) - 1)
    ns = np.array([2.0 ** e for e in exponents[-width - 1:]])
    beta = 2.0 * growth_exponent(q, hurst)
    values = np.array([exact_second_moment(q, hurst, int(n)) / n ** beta for n in ns])

    s = q * (2.0 - 2.0 * hurst)
    top = _c2_squared_fit(ns[-width:], values[-width:], s)
    lower = _c2_squared_fit(ns[-width - 1:-1], values[-width - 1:-1], s)

    c2 = math.sqrt(top)
    rounding = 64.0 * np.finfo(float).eps * c2
    err = abs(c2 - math.sqrt(lower)) + rounding
    logger.debug("c2_extrapolated", q=q, hurst=hurst, c2=c2, err=err, window=exponents[-width:])
    return c2, err


def c2_closed_form(q: int, hurst: float) -> float:
    """sqrt(2 q! (H(2H-1))^q / ((1-s)(2-s))), s = 2q(1-H): the limit c2 must reach."""
    s = 2.0 * q * (1.0 - hurst)
    return math.sqrt(2.0 * math.factorial(q) * (hurst * (2.0 * hurst - 1.0)) ** q / ((1.0 - s) * (2.0 - s)))


def normalization_constants(q: int, hurst: float, config: Optional[ConstantsConfig] = None) -> NormalizationConstants:
    """Regime-appropriate constants, cached per (q, H) after the first computation."""
    key = (validate_order(q), validate_hurst(hurst))
    cached = _constants_cache.get(key)
    if cached is not None:
        return cached

    with _constants_lock:
        cached = _constants_cache.get(key)
        if cached is not None:
            return cached
        if Regime.of(q, hurst).is_clt:
            c1, err1 = c1_constant(q, hurst, config)
            consts = NormalizationConstants(q=q, hurst=hurst, c1=c1, err1=err1)
        else:
            c2, err2 = c2_constant(q, hurst, config=config)
            closed = c2_closed_form(q, hurst)
            if abs(c2 - closed) > err2:
                logger.warning("c2_outside_error_bound", q=q, hurst=hurst, c2=c2, closed_form=closed, err=err2)
            consts = NormalizationConstants(q=q, hurst=hurst, c2=c2, err2=err2)
        _constants_cache[key] = consts
        logger.info("constants_computed", **consts.to_dict())
        return consts


def second_moment_majorant(q: int, hurst: float, config: Optional[ConstantsConfig] = None) -> Tuple[float, float]:
    """
    (A, gamma) with E[V_n^2] <= A n^gamma for every n >= 1.

    CLT regime: A = q! sum_Z |rho|^q (plus its tail bound), gamma = 1.
    Hermite regime: |rho(k)| <= H(2H-1)(k-1)^{2H-2} for k >= 2 and an integral
    comparison give A = q![1 + 2 rho(1)^q + 2 a^q (1 + 1/(1-s))], gamma = 2 - s.
    """
    config = config or load_config().constants
    q = validate_order(q)
    hurst = validate_hurst(hurst)
    regime = Regime.of(q, hurst)
    if regime.is_clt:
        total, bound = _absolute_rho_sum(q, hurst, config.c1_direct_terms)
        return math.factorial(q) * (total + bound), 1.0

    s = 2.0 * q * (1.0 - hurst)
    rho1 = float(fgn_autocovariances(hurst, 1)[1])
    lead = hurst * (2.0 * hurst - 1.0)
    amplitude = math.factorial(q) * (
        1.0 + 2.0 * abs(rho1) ** q + 2.0 * lead ** q * (1.0 + 1.0 / (1.0 - s))
    )
    return amplitude, 2.0 - s


__all__ = [
    "NormalizationConstants",
    "c1_constant",
    "c2_closed_form",
    "c2_constant",
    "exact_second_moment",
    "exact_second_moment_bruteforce",
    "normalization_constants",
    "second_moment_majorant",
]
