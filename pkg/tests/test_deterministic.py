import math

import numpy as np
import pytest
from scipy.special import erfc

from src.errors import FbmVarError
from src.limitlaws import NORMAL_TAIL, EmpiricalSample, normal_absolute_moment
from src.series import (
    SeriesKind,
    SeriesTag,
    euler_maclaurin_check,
    limit_series_from_sample,
    normal_power_integral,
    normal_power_series,
    normal_series_exact,
    q1_special,
)


@pytest.mark.parametrize("eps, expected, tol", [(0.1, 0.995, 0.005), (0.01, 1.0, 1e-3), (1e-3, 1.0, 1e-5)])
def test_hsu_robbins_normal_limit(eps, expected, tol):
    assert eps ** 2 * normal_series_exact(SeriesTag.G1, 1.0, eps) == pytest.approx(expected, abs=tol)


def test_spitzer_normal_ratio():
    # 2 + (2 E log|Z| + Euler's gamma) / (-log eps) at eps = 1e-6
    ratio = normal_series_exact(SeriesTag.F1, 1.0, 1e-6) / -math.log(1e-6)
    assert ratio == pytest.approx(1.9498, abs=0.002)


def test_spitzer_ratio_increases_towards_two():
    grid = [10.0 ** -k for k in range(3, 9)]
    ratios = [normal_series_exact("F1", 1.0, eps) / -math.log(eps) for eps in grid]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 2.0


def test_scale_covariance_is_exact():
    assert normal_series_exact(SeriesTag.G1, 2.0, 0.05) == normal_series_exact(SeriesTag.G1, 1.0, 0.1)


def test_direct_sum_for_moderate_scale():
    n = np.arange(1, 20_000, dtype=np.float64)
    direct = math.fsum(erfc(0.3 * np.sqrt(n) / math.sqrt(2.0)))
    assert normal_power_series(0, 0.5, 0.3) == pytest.approx(direct, rel=1e-13)


def test_integral_rejects_other_weights():
    with pytest.raises(ValueError):
        normal_power_integral(2, 0.5, 1.0, 1.0)


@pytest.mark.parametrize("tag, eps", [
    (SeriesTag.F1, 0.5),
    (SeriesTag.F1, 0.1),
    (SeriesTag.F1, 0.01),
    (SeriesTag.F1, 1e-3),
    (SeriesTag.G1, 0.5),
    (SeriesTag.G1, 0.1),
])
def test_euler_maclaurin_identity(tag, eps):
    decomposition = euler_maclaurin_check(NORMAL_TAIL, 1.0, eps, tag)
    assert decomposition.holds(1e-8)
    assert decomposition.boundary == pytest.approx(0.5 * math.erfc(eps / math.sqrt(2.0)))


def test_euler_maclaurin_correction_vanishes_relative_to_log():
    grid = [1e-3, 1e-5, 1e-7]
    ratios = [abs(euler_maclaurin_check(NORMAL_TAIL, 1.0, eps).correction) / -math.log(eps) for eps in grid]
    assert all(b < a for a, b in zip(ratios, ratios[1:]))


def test_euler_maclaurin_needs_analytic_tail():
    tail = EmpiricalSample(np.array([1.0, 2.0])).tail()
    with pytest.raises(ValueError):
        euler_maclaurin_check(tail, 1.0, 0.1)


def test_first_chaos_brownian_case_matches_normal_series():
    limits = q1_special(0.5, 1e-6)
    expected = normal_series_exact(SeriesTag.F1, 1.0, 1e-6) / -math.log(1e-6)
    assert limits.spitzer_ratio == pytest.approx(expected, rel=1e-12)
    assert limits.spitzer_target == 2.0


@pytest.mark.parametrize("hurst", [0.5, 0.7, 0.3])
def test_first_chaos_hsu_robbins(hurst):
    limits = q1_special(hurst, 0.01)
    assert limits.hsu_robbins_value == pytest.approx(normal_absolute_moment(1 / hurst), abs=2e-2)
    assert limits.hsu_robbins_target == pytest.approx(normal_absolute_moment(1 / hurst))


def test_first_chaos_rejects_bad_arguments():
    with pytest.raises(ValueError):
        q1_special(0.5, 1.5)
    with pytest.raises(FbmVarError):
        q1_special(1.0, 0.1)


def test_limit_series_from_sample_counts_terms():
    sample = EmpiricalSample(np.array([2.5, -1.0]))
    g1 = SeriesKind(SeriesTag.G1, 2, 0.5)
    f1 = SeriesKind(SeriesTag.F1, 2, 0.5)
    # |z| = 2.5 covers n <= 6, |z| = 1 covers nothing (sqrt(1) is not < 1)
    assert limit_series_from_sample(g1, sample, 1.0, 1.0) == pytest.approx(6 / 2)
    harmonic = sum(1 / n for n in range(1, 7))
    assert limit_series_from_sample(f1, sample, 1.0, 1.0) == pytest.approx(harmonic / 2, rel=1e-12)


def test_limit_series_from_normal_sample_approaches_exact():
    draws = np.random.default_rng(6).standard_normal(200_000)
    sample = EmpiricalSample.from_draws(draws)
    g1 = SeriesKind(SeriesTag.G1, 2, 0.5)
    exact = normal_series_exact(SeriesTag.G1, 1.0, 0.2)
    assert limit_series_from_sample(g1, sample, 1.0, 0.2) == pytest.approx(exact, rel=0.02)
