import pytest

from src.config import load_config
from src.errors import ConfigError


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("FBMVAR_SEED", "99")
    monkeypatch.setenv("FBMVAR_WORKERS", "3")
    config = load_config()
    assert config.series.seed == 99
    assert config.sampling.workers == 3


@pytest.mark.parametrize("name, value", [("FBMVAR_SEED", "abc"), ("FBMVAR_WORKERS", "2.5")])
def test_non_integer_environment_is_a_config_error(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigError) as info:
        load_config()
    assert info.value.flag == name
    assert value in info.value.message
