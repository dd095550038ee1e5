"""Shared fixtures: a small, isolated configuration for every test."""

import pytest
import structlog

from src.config import Config, load_config


@pytest.fixture(autouse=True)
def _reset_logging():
    yield
    structlog.reset_defaults()


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    path = tmp_path / "cache"
    monkeypatch.setenv("FBMVAR_CACHE_DIR", str(path))
    return path


@pytest.fixture
def config(cache_dir, monkeypatch) -> Config:
    """Default settings scaled down so Monte Carlo tests finish quickly."""
    monkeypatch.setenv("FBMVAR_WORKERS", "1")
    config = load_config()
    config.reference.m_path = 2 ** 8
    config.reference.m = 400
    config.series.budget = 200_000
    config.rates.replicas = 500
    return config
