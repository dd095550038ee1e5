"""Certified bounds on the neglected tail of a truncated series."""

import math
from dataclasses import dataclass
from typing import Optional

import structlog

from src.config import Config, load_config
from src.errors import NoConvergence
from src.variations import second_moment_majorant
from .kinds import SeriesKind

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class TruncationBound:
    """sum_{k > n} w(k) P(|V_k| > threshold) <= value, certified with moment order p."""
    value: float
    p: int
    n: int


def _decay(kind: SeriesKind, p: int, growth: float) -> float:
    """Exponent e with w(n) E|V_n|^{2p} / threshold^{2p} <= C n^-e."""
    return kind.weight_power + p * (2.0 * kind.threshold_power - growth)


def _admissible_orders(kind: SeriesKind, max_order: int, growth: float):
    for p in range(1, max_order + 1):
        if _decay(kind, p, growth) > 1.0:
            yield p


def _log_prefactor(kind: SeriesKind, p: int, amplitude: float, growth: float, eps: float) -> float:
    """log of (2p-1)^{pq} A^p eps^{-2p} / (e - 1)."""
    e = _decay(kind, p, growth)
    return (
        p * kind.q * math.log(2 * p - 1)
        + p * math.log(amplitude)
        - 2 * p * math.log(eps)
        - math.log(e - 1.0)
    )


def _best_bound(kind: SeriesKind, eps: float, n: int, amplitude: float, growth: float,
                max_order: int) -> TruncationBound:
    best: Optional[TruncationBound] = None
    for p in _admissible_orders(kind, max_order, growth):
        e = _decay(kind, p, growth)
        log_value = _log_prefactor(kind, p, amplitude, growth, eps) + (1.0 - e) * math.log(n)
        value = math.exp(log_value) if log_value < 700 else math.inf
        if best is None or value < best.value:
            best = TruncationBound(value=value, p=p, n=n)

    if best is None:
        raise NoConvergence(
            "no admissible moment order gives a summable remainder",
            kind=kind.tag.value, q=kind.q, hurst=kind.hurst,
        )
    return best


def truncation_bound_detail(
    kind: SeriesKind,
    eps: float,
    n: int,
    config: Optional[Config] = None,
) -> TruncationBound:
    """
    Smallest hypercontractive Markov bound over admissible moment orders.

    P(|V_n| > t) <= (2p-1)^{pq} (E V_n^2)^p / t^{2p} with E V_n^2 <= A n^gamma,
    and sum_{k > n} k^-e <= n^{1-e} / (e - 1).

    Raises:
        NoConvergence: if no p <= max order makes the remainder series summable.
    """
    config = config or load_config()
    if n < 1:
        raise ValueError(f"truncation point must be >= 1, got {n}")
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    amplitude, growth = second_moment_majorant(kind.q, kind.hurst, config.constants)
    return _best_bound(kind, eps, n, amplitude, growth, config.series.max_moment_order)


def truncation_bound(q: int, hurst: float, kind: SeriesKind, eps: float, n: int,
                     config: Optional[Config] = None) -> float:
    """Rigorous upper bound on sum_{k > n} w(k) P(|V_k| > threshold(eps, k))."""
    if (q, hurst) != (kind.q, kind.hurst):
        raise ValueError("kind was built for a different (q, H)")
    return truncation_bound_detail(kind, eps, n, config).value


def choose_n_trunc(kind: SeriesKind, eps: float, tol: float, config: Optional[Config] = None) -> TruncationBound:
    """
    min{N >= 1 : truncation_bound(N) <= tol}.

    Each order's bound is a power of N, so its crossing point is solved in
    closed form; the minimum over orders is the minimum of those crossings.
    """
    config = config or load_config()
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    amplitude, growth = second_moment_majorant(kind.q, kind.hurst, config.constants)
    max_order = config.series.max_moment_order

    crossing = math.inf
    for p in _admissible_orders(kind, max_order, growth):
        e = _decay(kind, p, growth)
        log_n = (_log_prefactor(kind, p, amplitude, growth, eps) - math.log(tol)) / (e - 1.0)
        candidate = 1.0 if log_n <= 0 else (math.ceil(math.exp(log_n)) if log_n < 40 else math.inf)
        crossing = min(crossing, candidate)

    if math.isinf(crossing):
        # Far beyond any budget; raises NoConvergence when no order is admissible.
        return _best_bound(kind, eps, 2 ** 62, amplitude, growth, max_order)

    def bound(k: int) -> TruncationBound:
        return _best_bound(kind, eps, k, amplitude, growth, max_order)

    n = int(crossing)
    # ceil(exp(.)) may land one step off the exact crossing in floating point.
    while n > 1 and bound(n - 1).value <= tol:
        n -= 1
    chosen = bound(n)
    while chosen.value > tol:
        n += 1
        chosen = bound(n)
    logger.info("n_trunc_selected", kind=kind.tag.value, eps=eps, tol=tol, n_trunc=n, p=chosen.p, bound=chosen.value)
    return chosen


def exponential_tail_diagnostic(u: float, sigma: float, q: int) -> float:
    """exp(-(u/sigma)^{2/q}): the chaos tail bound with its constant set to one. Not certified."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return math.exp(-((u / sigma) ** (2.0 / q)))
