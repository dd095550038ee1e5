"""The four series f1, f2, g1, g2 and the epsilon grids they are evaluated on."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from src.config import SeriesConfig, load_config
from src.errors import ConfigError, RegimeError
from src.sampling import validate_hurst
from src.variations import Regime, growth_exponent, validate_order


class SeriesTag(str, Enum):
    F1 = "F1"
    F2 = "F2"
    G1 = "G1"
    G2 = "G2"


@dataclass(frozen=True)
class SeriesKind:
    """
    One of the Spitzer (F) or Hsu-Robbins (G) series for fixed (q, H).

    F1, G1: sum_n w(n) P(|V_n| > eps n) in the CLT regime.
    F2, G2: sum_n w(n) P(|V_n| > eps n^{2 - 2q(1-H)}) in the Hermite regime.
    w(n) = 1/n for F and 1 for G.
    """
    tag: SeriesTag
    q: int
    hurst: float

    def __post_init__(self):
        object.__setattr__(self, "tag", SeriesTag(self.tag))
        object.__setattr__(self, "q", validate_order(self.q))
        object.__setattr__(self, "hurst", validate_hurst(self.hurst))
        regime = Regime.of(self.q, self.hurst)
        if self.needs_clt != regime.is_clt:
            raise RegimeError(
                f"{self.tag.value} requires the {'CLT' if self.needs_clt else 'Hermite'} regime",
                kind=self.tag.value, q=self.q, hurst=self.hurst, regime=regime.tag.value,
            )

    @classmethod
    def parse(cls, name: str, q: int, hurst: float) -> "SeriesKind":
        try:
            tag = SeriesTag(name.upper())
        except ValueError:
            raise ConfigError(f"unknown series kind {name!r}; expected f1, f2, g1 or g2", flag="--kind")
        return cls(tag, q, hurst)

    @property
    def needs_clt(self) -> bool:
        return self.tag in (SeriesTag.F1, SeriesTag.G1)

    @property
    def is_spitzer(self) -> bool:
        return self.tag in (SeriesTag.F1, SeriesTag.F2)

    @property
    def regime(self) -> Regime:
        return Regime.of(self.q, self.hurst)

    @property
    def weight_power(self) -> int:
        """w(n) = n^-weight_power."""
        return 1 if self.is_spitzer else 0

    @property
    def threshold_power(self) -> float:
        """threshold(eps, n) = eps n^threshold_power."""
        if self.needs_clt:
            return 1.0
        return 2.0 * growth_exponent(self.q, self.hurst)

    @property
    def tail_power(self) -> float:
        """P(|V_n| > threshold) = Phi_{Z_n}(eps/c n^tail_power)."""
        if self.needs_clt:
            return 0.5
        return growth_exponent(self.q, self.hurst)

    def weight(self, n):
        return np.asarray(n, dtype=np.float64) ** -float(self.weight_power)

    def threshold(self, eps: float, n):
        return eps * np.asarray(n, dtype=np.float64) ** self.threshold_power

    def label(self) -> str:
        return self.tag.value.lower()


@dataclass(frozen=True)
class EpsilonGrid:
    """Strictly decreasing positive epsilons."""
    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ConfigError("epsilon grid is empty", flag="--eps-grid")
        if any(not math.isfinite(v) or v <= 0 for v in values):
            raise ConfigError("epsilon values must be finite and positive", flag="--eps-grid")
        if any(b >= a for a, b in zip(values, values[1:])):
            raise ConfigError("epsilon grid must be strictly decreasing", flag="--eps-grid")
        object.__setattr__(self, "values", values)

    @classmethod
    def geometric(cls, start: float, ratio: float, points: int) -> "EpsilonGrid":
        if not 0.0 < ratio < 1.0:
            raise ConfigError(f"grid ratio must lie in (0, 1), got {ratio}", flag="--eps-grid")
        if points < 1:
            raise ConfigError("grid needs at least one point", flag="--eps-grid")
        return cls(tuple(start * ratio ** i for i in range(points)))

    @classmethod
    def parse(cls, text: str) -> "EpsilonGrid":
        """Comma-separated values, or ``start:ratio:points`` for a geometric grid."""
        try:
            if ":" in text:
                start, ratio, points = text.split(":")
                return cls.geometric(float(start), float(ratio), int(points))
            return cls(tuple(float(v) for v in text.split(",") if v.strip()))
        except ValueError:
            raise ConfigError(f"cannot parse epsilon grid {text!r}", flag="--eps-grid")

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


def default_epsilon_grid(kind: SeriesKind, config: Optional[SeriesConfig] = None) -> EpsilonGrid:
    """Ratio 1/sqrt(10), largest epsilon with threshold(eps, 1) = 3 sqrt(E V_1^2) = 3 sqrt(q!)."""
    config = config or load_config().series
    start = 3.0 * math.sqrt(math.factorial(kind.q))
    return EpsilonGrid.geometric(start, config.grid_ratio, config.grid_points)


def bands_for(n_trunc: int) -> Sequence[Tuple[int, int]]:
    """Dyadic n-bands [1,1], [2,2], [3,4], [5,8], ... covering 1..n_trunc."""
    bands = []
    lo = 1
    hi = 1
    while lo <= n_trunc:
        bands.append((lo, min(hi, n_trunc)))
        lo, hi = hi + 1, 2 * hi
    return bands
