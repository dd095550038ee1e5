import math

import pytest

from src.config import ConstantsConfig
from src.errors import FbmVarError, RegimeError
from src.variations import (
    c1_constant,
    c2_closed_form,
    c2_constant,
    exact_second_moment,
    exact_second_moment_bruteforce,
    normalization_constants,
    second_moment_majorant,
)


@pytest.mark.parametrize("q, hurst, n, expected", [(2, 0.5, 10, 20.0), (3, 0.5, 7, 42.0)])
def test_exact_second_moment_white_noise(q, hurst, n, expected):
    assert exact_second_moment(q, hurst, n) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("q, hurst, n", [(2, 0.7, 64), (3, 0.9, 200), (2, 0.3, 128)])
def test_folded_sum_matches_double_loop(q, hurst, n):
    folded = exact_second_moment(q, hurst, n)
    brute = exact_second_moment_bruteforce(q, hurst, n)
    assert folded == pytest.approx(brute, rel=1e-12)


def test_first_order_second_moment_is_power_law():
    assert exact_second_moment(1, 0.8, 1000) == pytest.approx(1000 ** 1.6, rel=1e-10)


@pytest.mark.parametrize("q, expected", [(2, math.sqrt(2.0)), (3, math.sqrt(6.0))])
def test_c1_at_half(q, expected):
    c1, err = c1_constant(q, 0.5)
    assert c1 == pytest.approx(expected, abs=1e-8)
    assert err <= 1e-8


def test_c1_stable_under_more_direct_terms():
    short, err_short = c1_constant(2, 0.6, ConstantsConfig(c1_direct_terms=2 ** 12))
    long, err_long = c1_constant(2, 0.6, ConstantsConfig(c1_direct_terms=2 ** 16))
    assert abs(short - long) <= err_short + err_long + 1e-12
    assert err_long <= 1e-8


@pytest.mark.parametrize("q, hurst", [(2, 0.9), (1, 0.3)])
def test_c1_outside_its_domain(q, hurst):
    with pytest.raises(RegimeError):
        c1_constant(q, hurst)


def test_c2_first_order_is_one():
    c2, _ = c2_constant(1, 0.8)
    assert c2 == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("q, hurst", [(2, 0.9), (2, 0.85), (3, 0.95)])
def test_c2_reaches_closed_form(q, hurst):
    c2, err = c2_constant(q, hurst)
    assert c2 == pytest.approx(c2_closed_form(q, hurst), rel=5e-3)
    assert err >= 0.0


@pytest.mark.parametrize("q, hurst", [(2, 0.76), (2, 0.8), (2, 0.9), (3, 0.9), (3, 0.85)])
def test_c2_error_covers_closed_form_gap(q, hurst):
    c2, err = c2_constant(q, hurst)
    assert abs(c2 - c2_closed_form(q, hurst)) <= err
    assert err < 1e-3 * c2


@pytest.mark.parametrize("hurst", [0.76, 0.8, 0.9])
def test_c2_error_shrinks_with_one_more_octave(hurst):
    _, err = c2_constant(2, hurst, grid_exponents=range(10, 21))
    _, err_longer = c2_constant(2, hurst, grid_exponents=range(10, 22))
    assert err_longer < err


def test_c2_needs_four_grid_points():
    with pytest.raises(FbmVarError):
        c2_constant(2, 0.9, grid_exponents=[10, 11, 12])


def test_c2_rejected_in_clt_regime():
    with pytest.raises(RegimeError):
        c2_constant(2, 0.5)


def test_constants_are_cached():
    first = normalization_constants(2, 0.5)
    assert normalization_constants(2, 0.5) is first
    payload = first.to_dict()
    assert payload["regime"] == "CLT"
    assert payload["c1"] == pytest.approx(math.sqrt(2.0))


def test_hermite_constants_payload():
    payload = normalization_constants(2, 0.9).to_dict()
    assert payload["regime"] == "HERMITE"
    assert "c2" in payload and "certified_error" in payload
    assert abs(payload["c2"] - payload["closed_form"]) <= payload["certified_error"]


@pytest.mark.parametrize("q, hurst", [(2, 0.5), (2, 0.7), (2, 0.9), (3, 0.9), (3, 0.6), (1, 0.8)])
def test_majorant_dominates_second_moment(q, hurst):
    amplitude, growth = second_moment_majorant(q, hurst)
    for n in (1, 2, 3, 10, 100, 1000, 4096):
        assert exact_second_moment(q, hurst, n) <= amplitude * n ** growth * (1 + 1e-12)
