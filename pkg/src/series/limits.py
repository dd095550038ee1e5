"""Predicted epsilon -> 0 limits, normalized ratios and limit-law series."""

import math
from dataclasses import dataclass
from typing import Optional

from src.errors import RegimeError
from src.limitlaws import EmpiricalSample, normal_absolute_moment
from src.variations import NormalizationConstants, normalization_constants
from .deterministic import limit_series_from_sample, normal_power_series
from .kinds import SeriesKind, SeriesTag


@dataclass(frozen=True)
class LimitPrediction:
    value: float
    stderr: float = 0.0


def _scale(kind: SeriesKind, consts: Optional[NormalizationConstants]) -> float:
    consts = consts or normalization_constants(kind.q, kind.hurst)
    return consts.scale(kind.regime)


def predicted_limit(kind: SeriesKind, reference: Optional[EmpiricalSample] = None) -> LimitPrediction:
    """
    F1 -> 2, F2 -> 1/(1 - q(1-H)), G1 -> 1 and G2 -> E|Z^(2)|^{1/(1 - q(1-H))}.

    The G2 moment comes from the reference sample with its standard error;
    for q = 1 the limit law is Gaussian and the moment is exact.

    Raises:
        RegimeError: if a G2 limit with q >= 2 is requested without a reference sample.
    """
    if kind.tag is SeriesTag.F1:
        return LimitPrediction(2.0)
    if kind.tag is SeriesTag.G1:
        return LimitPrediction(1.0)
    exponent = 1.0 / kind.tail_power
    if kind.tag is SeriesTag.F2:
        return LimitPrediction(exponent)
    if kind.q == 1:
        return LimitPrediction(normal_absolute_moment(exponent))
    if reference is None:
        raise RegimeError("the G2 limit needs a Hermite reference sample", q=kind.q, hurst=kind.hurst)
    mean, stderr = reference.absolute_moment(exponent)
    return LimitPrediction(mean, stderr)


def normalized_ratio(kind: SeriesKind, eps: float, value: float,
                     consts: Optional[NormalizationConstants] = None) -> float:
    """
    The quantity whose limit ``predicted_limit`` gives: value / (-log(eps/c)) for
    Spitzer series, (eps/c)^{1/a} value for Hsu-Robbins series.
    """
    reduced = eps / _scale(kind, consts)
    if kind.is_spitzer:
        return value / -math.log(reduced)
    return reduced ** (1.0 / kind.tail_power) * value


def limit_series(
    kind: SeriesKind,
    eps: float,
    consts: Optional[NormalizationConstants] = None,
    reference: Optional[EmpiricalSample] = None,
) -> float:
    """
    The series with Z_n replaced by its limit law: sum_n w(n) Phi_Z(eps/c n^a).

    Gaussian limits are summed deterministically; the Hermite limit for q >= 2
    uses the reference sample.
    """
    reduced = eps / _scale(kind, consts)
    if kind.needs_clt or kind.q == 1:
        return normal_power_series(kind.weight_power, kind.tail_power, reduced)
    if reference is None:
        raise RegimeError("the Hermite limit series needs a reference sample", q=kind.q, hurst=kind.hurst)
    return limit_series_from_sample(kind, reference, 1.0, reduced)
