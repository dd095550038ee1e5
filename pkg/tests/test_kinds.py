import math

import pytest

from src.errors import ConfigError, RegimeError
from src.series import EpsilonGrid, SeriesKind, SeriesTag, bands_for, default_epsilon_grid


def test_parse_is_case_insensitive():
    kind = SeriesKind.parse("g1", 2, 0.5)
    assert kind.tag is SeriesTag.G1
    assert kind.label() == "g1"


def test_unknown_kind_names_flag():
    with pytest.raises(ConfigError) as info:
        SeriesKind.parse("h3", 2, 0.5)
    assert info.value.flag == "--kind"


@pytest.mark.parametrize("tag, q, hurst", [
    (SeriesTag.F2, 2, 0.5),
    (SeriesTag.G2, 3, 0.7),
    (SeriesTag.F1, 2, 0.9),
    (SeriesTag.G1, 1, 0.8),
])
def test_kinds_are_gated_by_regime(tag, q, hurst):
    with pytest.raises(RegimeError):
        SeriesKind(tag, q, hurst)


def test_clt_powers():
    f1 = SeriesKind(SeriesTag.F1, 2, 0.5)
    assert (f1.weight_power, f1.threshold_power, f1.tail_power) == (1, 1.0, 0.5)
    assert f1.is_spitzer and f1.needs_clt
    assert f1.weight(4) == 0.25
    assert f1.threshold(0.5, 4) == 2.0


def test_hermite_powers():
    g2 = SeriesKind(SeriesTag.G2, 2, 0.9)
    assert g2.weight_power == 0
    assert g2.tail_power == pytest.approx(0.8)
    assert g2.threshold_power == pytest.approx(1.6)
    assert not g2.is_spitzer


def test_grid_parsing():
    assert EpsilonGrid.parse("1,0.5,0.1").values == (1.0, 0.5, 0.1)
    assert EpsilonGrid.parse("1:0.5:3").values == (1.0, 0.5, 0.25)


@pytest.mark.parametrize("text", ["0.1,0.5", "1,-1", "", "a,b", "1:2:3"])
def test_bad_grids_name_flag(text):
    with pytest.raises(ConfigError) as info:
        EpsilonGrid.parse(text)
    assert info.value.flag == "--eps-grid"


def test_default_grid(config):
    grid = default_epsilon_grid(SeriesKind(SeriesTag.G1, 2, 0.5), config.series)
    assert len(grid) == config.series.grid_points
    assert grid.values[0] == pytest.approx(3 * math.sqrt(2))
    assert grid.values[1] / grid.values[0] == pytest.approx(10 ** -0.5)


def test_dyadic_bands():
    assert bands_for(1) == [(1, 1)]
    assert bands_for(9) == [(1, 1), (2, 2), (3, 4), (5, 8), (9, 9)]
    assert bands_for(16)[-1] == (9, 16)
