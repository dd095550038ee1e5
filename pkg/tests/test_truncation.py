import math

import pytest

from src.errors import NoConvergence
from src.series import (
    SeriesKind,
    SeriesTag,
    choose_n_trunc,
    exponential_tail_diagnostic,
    truncation_bound,
    truncation_bound_detail,
)
from src.variations import second_moment_majorant


def test_bound_decreases_in_n(config):
    kind = SeriesKind(SeriesTag.G1, 2, 0.5)
    values = [truncation_bound(2, 0.5, kind, 1.0, n, config) for n in (10, 100, 1000, 10_000)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert all(math.isfinite(v) for v in values)


def test_bound_decreases_in_epsilon(config):
    kind = SeriesKind(SeriesTag.F1, 2, 0.5)
    assert truncation_bound(2, 0.5, kind, 2.0, 100, config) < truncation_bound(2, 0.5, kind, 1.0, 100, config)


def test_f1_second_moment_order(config):
    kind = SeriesKind(SeriesTag.F1, 2, 0.5)
    amplitude, _ = second_moment_majorant(2, 0.5, config.constants)
    eps, n = 0.7, 500
    # p = 1: sum_{k > n} (1/k) A k / (eps k)^2 <= A / (eps^2 n)
    assert truncation_bound(2, 0.5, kind, eps, n, config) <= amplitude / (eps ** 2 * n) * (1 + 1e-12)


def test_chosen_truncation_is_minimal(config):
    kind = SeriesKind(SeriesTag.F1, 2, 0.5)
    chosen = choose_n_trunc(kind, 0.5, 0.02, config)
    assert chosen.value <= 0.02
    if chosen.n > 1:
        assert truncation_bound_detail(kind, 0.5, chosen.n - 1, config).value > 0.02


def test_huge_epsilon_needs_one_term(config):
    chosen = choose_n_trunc(SeriesKind(SeriesTag.G1, 2, 0.5), 1e3, 0.02, config)
    assert chosen.n == 1
    assert chosen.value <= 0.02


def test_hermite_bound_dominates_partial_majorant(config):
    kind = SeriesKind(SeriesTag.G2, 2, 0.9)
    eps, n = 0.5, 10_000
    detail = truncation_bound_detail(kind, eps, n, config)
    amplitude, growth = second_moment_majorant(2, 0.9, config.constants)
    p = detail.p
    e = kind.weight_power + p * (2 * kind.threshold_power - growth)
    prefactor = (2 * p - 1) ** (p * kind.q) * amplitude ** p * eps ** (-2 * p)
    partial = prefactor * math.fsum(k ** -e for k in range(n + 1, n + 200_001))
    assert partial <= detail.value


def test_no_admissible_order(config):
    config.series.max_moment_order = 1
    with pytest.raises(NoConvergence):
        truncation_bound_detail(SeriesKind(SeriesTag.G1, 2, 0.5), 1.0, 100, config)


def test_arguments_validated(config):
    kind = SeriesKind(SeriesTag.G1, 2, 0.5)
    with pytest.raises(ValueError):
        choose_n_trunc(kind, 0.0, 0.02, config)
    with pytest.raises(ValueError):
        truncation_bound(3, 0.5, kind, 1.0, 10, config)


def test_exponential_diagnostic():
    assert exponential_tail_diagnostic(0.0, 1.0, 2) == 1.0
    assert exponential_tail_diagnostic(4.0, 1.0, 2) == pytest.approx(math.exp(-4.0))
