"""Configuration management for fbm-variations."""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

from src.errors import ConfigError


def _default_cache_dir() -> str:
    return os.getenv(
        "FBMVAR_CACHE_DIR",
        str(Path.home() / ".cache" / "fbmvar"),
    )


def _env_int(name: str, default: str) -> int:
    value = os.getenv(name, default)
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {value!r}", flag=name) from None


@dataclass
class SamplingConfig:
    """Exact fGn synthesis settings."""
    eigen_tolerance: float = 1e-10  # relative to the largest circulant eigenvalue
    dense_fallback_max_n: int = 4096
    chunk_size: int = 64  # replicas per work item, independent of worker count
    chunk_elements: int = 2 ** 22  # caps replicas x path length held in one work item
    workers: int = field(default_factory=lambda: _env_int("FBMVAR_WORKERS", "1"))


@dataclass
class ConstantsConfig:
    """Normalization constant computation."""
    c1_direct_terms: int = 2 ** 16
    c1_target_error: float = 1e-8
    c2_grid_exponents: List[int] = field(default_factory=lambda: list(range(10, 21)))


@dataclass
class SeriesConfig:
    """Spitzer / Hsu-Robbins series estimation."""
    tolerance: float = 0.02
    budget: int = 10_000_000  # cap on sum over n of replicas(n)
    max_n_trunc: int = 2 ** 20
    min_replicas: int = 200
    max_replicas_per_n: int = 1_000_000
    max_moment_order: int = 8
    grid_ratio: float = 10 ** -0.5
    grid_points: int = 8
    seed: int = field(default_factory=lambda: _env_int("FBMVAR_SEED", "20240601"))


@dataclass
class ReferenceConfig:
    """Frozen Hermite-limit reference sample."""
    m_path: int = 2 ** 16
    m: int = 100_000
    seed: int = 0x5EED_F00D
    cache_dir: str = field(default_factory=_default_cache_dir)


@dataclass
class RatesConfig:
    """Kolmogorov-distance rate experiments."""
    n_grid: List[int] = field(default_factory=lambda: [2 ** k for k in range(6, 13)])
    replicas: int = 5000
    slope_replicas: int = 200_000


@dataclass
class Config:
    """Main configuration container."""
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    constants: ConstantsConfig = field(default_factory=ConstantsConfig)
    series: SeriesConfig = field(default_factory=SeriesConfig)
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)
    rates: RatesConfig = field(default_factory=RatesConfig)


def load_config() -> Config:
    """Load configuration from environment variables."""
    from dotenv import load_dotenv
    load_dotenv()
    return Config()
