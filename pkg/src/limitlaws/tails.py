"""Two-sided tail functionals and Kolmogorov distances."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
from scipy import stats
from scipy.special import erfc

ArrayLike = Union[float, np.ndarray]

_SQRT2 = math.sqrt(2.0)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


class TailTag(str, Enum):
    ANALYTIC_NORMAL = "ANALYTIC_NORMAL"
    EMPIRICAL = "EMPIRICAL"


def _check_nonnegative(z: ArrayLike) -> None:
    if np.any(np.asarray(z) < 0):
        raise ValueError("tail functionals are evaluated at z >= 0")


def phi_normal(z: ArrayLike) -> ArrayLike:
    """Phi_Z(z) = P(|Z| > z) = erfc(z / sqrt 2) for a standard normal Z."""
    _check_nonnegative(z)
    out = erfc(np.asarray(z, dtype=np.float64) / _SQRT2)
    return float(out) if np.ndim(out) == 0 else out


def phi_normal_derivative(z: ArrayLike) -> ArrayLike:
    """d/dz Phi_Z(z) = -2 phi(z)."""
    z = np.asarray(z, dtype=np.float64)
    out = -_SQRT_2_OVER_PI * np.exp(-0.5 * z * z)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class EmpiricalSample:
    """Sorted draws of a law together with where they came from."""
    values: np.ndarray
    provenance: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("an empirical sample needs at least one point")
        if np.any(np.diff(values) < 0):
            values = np.sort(values)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        magnitudes = np.sort(np.abs(values))
        magnitudes.setflags(write=False)
        object.__setattr__(self, "_magnitudes", magnitudes)

    @classmethod
    def from_draws(cls, draws, **provenance) -> "EmpiricalSample":
        return cls(np.sort(np.asarray(draws, dtype=np.float64)), dict(provenance))

    @property
    def m(self) -> int:
        return int(self.values.size)

    @property
    def magnitudes(self) -> np.ndarray:
        return self._magnitudes

    def tail(self) -> "TwoSidedTail":
        return TwoSidedTail(TailTag.EMPIRICAL, lambda z: empirical_tail(self, z))

    def absolute_moment(self, p: float) -> Tuple[float, float]:
        """Sample mean of |x|^p and its standard error."""
        powered = self.magnitudes ** p
        if self.m == 1:
            return float(powered[0]), 0.0
        return float(np.mean(powered)), float(np.std(powered, ddof=1) / math.sqrt(self.m))


def empirical_tail(sample: EmpiricalSample, z: ArrayLike) -> ArrayLike:
    """Fraction of sample points with |x| > z, by binary search on the sorted magnitudes."""
    _check_nonnegative(z)
    above = sample.m - np.searchsorted(sample.magnitudes, z, side="right")
    out = above / sample.m
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class TwoSidedTail:
    """z -> Phi_X(z) = 1 - P(X < z) + P(X < -z) on z >= 0."""
    tag: TailTag
    fn: Callable[[ArrayLike], ArrayLike]
    derivative: Optional[Callable[[ArrayLike], ArrayLike]] = None

    def __call__(self, z: ArrayLike) -> ArrayLike:
        return self.fn(z)


NORMAL_TAIL = TwoSidedTail(TailTag.ANALYTIC_NORMAL, phi_normal, phi_normal_derivative)


def normal_absolute_moment(p: float) -> float:
    """E|Z|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)."""
    return 2.0 ** (p / 2.0) * math.gamma((p + 1.0) / 2.0) / math.sqrt(math.pi)


def ks_distance(sample: Union[EmpiricalSample, np.ndarray], cdf: Union[str, Callable] = "norm") -> float:
    """One-sample Kolmogorov statistic sup |F_m - F| against an analytic CDF."""
    values = sample.values if isinstance(sample, EmpiricalSample) else np.asarray(sample)
    return float(stats.kstest(values, cdf).statistic)


def ks_two_sample(a: Union[EmpiricalSample, np.ndarray], b: Union[EmpiricalSample, np.ndarray]) -> float:
    """Two-sample Kolmogorov statistic between empirical laws."""
    a = a.values if isinstance(a, EmpiricalSample) else np.asarray(a)
    b = b.values if isinstance(b, EmpiricalSample) else np.asarray(b)
    return float(stats.ks_2samp(a, b).statistic)


def ks_stderr(m: int) -> float:
    """Standard deviation of the one-sample Kolmogorov statistic under the null, m points."""
    return float(stats.kstwo(m).std())


def wilson_interval(hits: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    ci = stats.binomtest(int(hits), int(trials)).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)
