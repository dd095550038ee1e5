"""Deterministic series for Gaussian and empirical limit laws."""

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import structlog
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.special import digamma, erf

from src.sampling import validate_hurst
from src.limitlaws import (
    NORMAL_TAIL,
    EmpiricalSample,
    TailTag,
    TwoSidedTail,
    normal_absolute_moment,
    phi_normal,
    phi_normal_derivative,
)
from .kinds import SeriesKind, SeriesTag

logger = structlog.get_logger(__name__)

DIRECT_TERMS = 2 ** 20
# phi_normal underflows to zero beyond this argument.
_NEGLIGIBLE_ARG = 39.0
_CORRECTION_INTERVALS = 2 ** 14
_GAUSS_NODES = 20
_QUAD = dict(epsabs=1e-15, epsrel=1e-13, limit=400)


def _weight_power(kind: Union[SeriesKind, SeriesTag, str]) -> int:
    if isinstance(kind, SeriesKind):
        return kind.weight_power
    tag = SeriesTag(kind.upper() if isinstance(kind, str) else kind)
    return 1 if tag in (SeriesTag.F1, SeriesTag.F2) else 0


def _term(w: int, a: float, scale: float, x, tail: Callable = phi_normal):
    x = np.asarray(x, dtype=np.float64)
    return x ** -float(w) * tail(scale * x ** a)


def _term_derivative(w: int, a: float, scale: float, x, tail: TwoSidedTail = NORMAL_TAIL):
    """d/dx of x^-w Phi(scale x^a)."""
    x = np.asarray(x, dtype=np.float64)
    u = scale * x ** a
    return -w * x ** (-w - 1.0) * tail(u) + x ** -float(w) * tail.derivative(u) * scale * a * x ** (a - 1.0)


def normal_power_integral(w: int, a: float, scale: float, lower: float) -> float:
    """
    int_lower^inf x^-w Phi(scale x^a) dx for w in {0, 1} and the normal tail.

    With y = scale x^a the integral becomes (1/a) scale^{(w-1)/a} times
    int_{y0}^inf y^{(1-w)/a - 1} Phi(y) dy. For w = 1 and y0 < 1 the
    logarithmic part is split off: int_{y0}^1 Phi(y)/y = -log y0 - int_{y0}^1 erf(y/sqrt2)/y.
    """
    y0 = scale * lower ** a
    if w == 1:
        if y0 >= 1.0:
            inner = quad(lambda y: phi_normal(y) / y, y0, np.inf, **_QUAD)[0]
        else:
            near = quad(lambda y: erf(y / math.sqrt(2.0)) / y, y0, 1.0, **_QUAD)[0]
            far = quad(lambda y: phi_normal(y) / y, 1.0, np.inf, **_QUAD)[0]
            inner = -math.log(y0) - near + far
        return inner / a
    if w == 0:
        power = 1.0 / a - 1.0
        inner = quad(lambda y: y ** power * phi_normal(y), y0, np.inf, **_QUAD)[0]
        return inner * scale ** (-1.0 / a) / a
    raise ValueError(f"weight power must be 0 or 1, got {w}")


def normal_power_series(w: int, a: float, scale: float, direct_terms: int = DIRECT_TERMS) -> float:
    """
    sum_{n >= 1} n^-w Phi(scale n^a) for the normal tail.

    Terms are summed directly up to where the Gaussian tail underflows or up
    to ``direct_terms``; past that the Euler-Maclaurin tail
    int_N^inf f - f(N)/2 - f'(N)/12 is added.
    """
    if scale <= 0 or a <= 0:
        raise ValueError("scale and exponent must be positive")
    log_cut = math.log(_NEGLIGIBLE_ARG / scale) / a
    complete = log_cut < math.log(direct_terms)
    last = max(1, math.ceil(math.exp(log_cut))) if complete else direct_terms

    n = np.arange(1, last + 1, dtype=np.float64)
    head = math.fsum(_term(w, a, scale, n))
    if complete:
        return head

    big_n = float(last)
    tail = [
        normal_power_integral(w, a, scale, big_n),
        -0.5 * float(_term(w, a, scale, big_n)),
        -float(_term_derivative(w, a, scale, big_n)) / 12.0,
    ]
    return math.fsum([head, *tail])


def normal_series_exact(kind: Union[SeriesKind, SeriesTag, str], c: float, eps: float) -> float:
    """sum_n w(n) Phi_N(c eps sqrt n) with w(n) = 1/n (F1 shape) or 1 (G1 shape)."""
    if c <= 0 or eps <= 0:
        raise ValueError("c and eps must be positive")
    return normal_power_series(_weight_power(kind), 0.5, c * eps)


@dataclass(frozen=True)
class EulerMaclaurinDecomposition:
    """Direct series against integral + boundary + periodic-Bernoulli correction."""
    series: float
    integral: float
    boundary: float
    correction: float

    @property
    def total(self) -> float:
        return math.fsum([self.integral, self.boundary, self.correction])

    @property
    def residual(self) -> float:
        return self.series - self.total

    def holds(self, tolerance: float = 1e-8) -> bool:
        return abs(self.residual) <= tolerance


def euler_maclaurin_check(
    tail: TwoSidedTail,
    c: float,
    eps: float,
    kind: Union[SeriesKind, SeriesTag, str] = SeriesTag.F1,
) -> EulerMaclaurinDecomposition:
    """
    Split sum_{n>=1} f(n), f(x) = x^-w Phi(c eps sqrt x), into
    int_1^inf f + f(1)/2 + int_1^inf (x - [x] - 1/2) f'(x) dx.

    The correction integral is done with Gauss-Legendre on each unit interval
    up to K and closed with -f'(K)/12.
    """
    if tail.tag is not TailTag.ANALYTIC_NORMAL or tail.derivative is None:
        raise ValueError("the Euler-Maclaurin split needs an analytic tail with a derivative")
    w = _weight_power(kind)
    scale = c * eps

    nodes, weights = leggauss(_GAUSS_NODES)
    t = 0.5 * (nodes + 1.0)
    kernel = 0.5 * weights * (t - 0.5)
    starts = np.arange(1, _CORRECTION_INTERVALS, dtype=np.float64)
    fprime = _term_derivative(w, 0.5, scale, starts[:, None] + t[None, :], tail)
    correction = math.fsum([
        math.fsum((fprime * kernel).ravel()),
        -float(_term_derivative(w, 0.5, scale, float(_CORRECTION_INTERVALS), tail)) / 12.0,
    ])

    decomposition = EulerMaclaurinDecomposition(
        series=normal_power_series(w, 0.5, scale),
        integral=normal_power_integral(w, 0.5, scale, 1.0),
        boundary=0.5 * float(tail(scale)),
        correction=correction,
    )
    if not decomposition.holds():
        logger.warning("euler_maclaurin_mismatch", c=c, eps=eps, residual=decomposition.residual)
    return decomposition


@dataclass(frozen=True)
class FirstChaosLimits:
    """Both q = 1 displays: values and the limits they approach."""
    hurst: float
    eps: float
    spitzer_ratio: float
    hsu_robbins_value: float

    @property
    def spitzer_target(self) -> float:
        return 1.0 / self.hurst

    @property
    def hsu_robbins_target(self) -> float:
        return normal_absolute_moment(1.0 / self.hurst)


def q1_special(hurst: float, eps: float) -> FirstChaosLimits:
    """
    V_n = B_n ~ N(0, n^{2H}) at q = 1, so P(|V_n| > eps n^{2H}) = Phi_N(eps n^H).

    Returns sum (1/n) Phi_N(eps n^H) / (-log eps) -> 1/H and
    eps^{1/H} sum Phi_N(eps n^H) -> E|Z|^{1/H}.
    """
    hurst = validate_hurst(hurst)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    spitzer = normal_power_series(1, hurst, eps) / -math.log(eps)
    hsu_robbins = eps ** (1.0 / hurst) * normal_power_series(0, hurst, eps)
    return FirstChaosLimits(hurst, eps, spitzer, hsu_robbins)


def limit_series_from_sample(kind: SeriesKind, sample: EmpiricalSample, c: float, eps: float) -> float:
    """
    sum_n w(n) Phi_emp(c eps n^a), a = kind.tail_power, in closed form.

    Sample point z contributes w(1) + ... + w(N_z) with N_z = #{n >= 1 : c eps n^a < |z|},
    i.e. N_z itself for G kinds and the harmonic number H_{N_z} for F kinds.
    """
    if c <= 0 or eps <= 0:
        raise ValueError("c and eps must be positive")
    a = kind.tail_power
    with np.errstate(divide="ignore"):
        reach = (sample.magnitudes / (c * eps)) ** (1.0 / a)
    counts = np.maximum(np.ceil(reach) - 1.0, 0.0)
    if kind.weight_power == 1:
        contributions = digamma(counts + 1.0) + np.euler_gamma
    else:
        contributions = counts
    return math.fsum(contributions) / sample.m
