"""Hermite variations V_n, regimes and their normalizations."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from src.errors import RegimeError
from src.sampling.fgn import FgnSample, validate_hurst
from .hermite import hermite_eval, validate_order

if TYPE_CHECKING:
    from .moments import NormalizationConstants


class RegimeTag(str, Enum):
    CLT = "CLT"
    HERMITE = "HERMITE"


def critical_hurst(q: int) -> float:
    """The boundary 1 - 1/(2q) between the two limit theorems."""
    return 1.0 - 1.0 / (2.0 * q)


def growth_exponent(q: int, hurst: float) -> float:
    """1 - q(1 - H): the order of ||V_n||_2 is n to this power in the Hermite regime."""
    return 1.0 - q * (1.0 - hurst)


@dataclass(frozen=True)
class Regime:
    """Which limit theorem governs V_n for (q, H)."""
    tag: RegimeTag
    q: int
    hurst: float

    @classmethod
    def of(cls, q: int, hurst: float) -> "Regime":
        q = validate_order(q)
        hurst = validate_hurst(hurst)
        boundary = critical_hurst(q)
        if math.isclose(hurst, boundary, rel_tol=0.0, abs_tol=1e-12):
            raise RegimeError(
                "H = 1 - 1/(2q) needs a logarithmic normalization and is not supported",
                q=q, hurst=hurst,
            )
        tag = RegimeTag.CLT if hurst < boundary else RegimeTag.HERMITE
        return cls(tag, q, hurst)

    @property
    def is_clt(self) -> bool:
        return self.tag is RegimeTag.CLT

    def normalizer(self, n: int) -> float:
        """sqrt(n) in the CLT regime, n^{1 - q(1-H)} in the Hermite regime."""
        if self.is_clt:
            return math.sqrt(n)
        return float(n) ** growth_exponent(self.q, self.hurst)


@dataclass(frozen=True)
class VariationStatistic:
    """V_n = sum_k H_q(X_k) for one standardized increment sample."""
    q: int
    hurst: float
    n: int
    value: float


def compute_vn(q: int, sample: FgnSample) -> VariationStatistic:
    """Sum of H_q over the increments, accumulated with correctly rounded summation."""
    q = validate_order(q)
    if sample.n == 0:
        raise ValueError("sample must be nonempty")
    value = math.fsum(hermite_eval(q, sample.increments))
    return VariationStatistic(q=q, hurst=sample.hurst, n=sample.n, value=value)


# Block length of the two-level compensated prefix sum.
PREFIX_BLOCK = 256


def _neumaier_add(total: np.ndarray, carry: np.ndarray, x: np.ndarray):
    s = total + x
    carry = carry + np.where(np.abs(total) >= np.abs(x), (total - s) + x, (x - s) + total)
    return s, carry


def compensated_cumsum(values: np.ndarray, block: int = PREFIX_BLOCK) -> np.ndarray:
    """
    Running sums along the last axis with Neumaier compensation.

    Each block of ``block`` terms is scanned with a vectorized compensated
    sum; the block totals are then chained the same way, so every prefix
    carries an error of a few ulps instead of growing with its length.
    """
    values = np.asarray(values, dtype=np.float64)
    length = values.shape[-1]
    if length == 0:
        return values.copy()
    lead = values.shape[:-1]
    blocks = -(-length // block)
    padded = np.zeros(lead + (blocks * block,))
    padded[..., :length] = values
    x = padded.reshape(lead + (blocks, block))

    hi = np.empty_like(x)
    lo = np.empty_like(x)
    total = np.zeros(lead + (blocks,))
    carry = np.zeros_like(total)
    for j in range(block):
        total, carry = _neumaier_add(total, carry, x[..., j])
        hi[..., j] = total
        lo[..., j] = carry

    offset_hi = np.empty(lead + (blocks,))
    offset_lo = np.empty_like(offset_hi)
    total = np.zeros(lead)
    carry = np.zeros(lead)
    for b in range(blocks):
        offset_hi[..., b] = total
        offset_lo[..., b] = carry
        total, carry = _neumaier_add(total, carry, hi[..., b, -1])
        carry = carry + lo[..., b, -1]

    prefixes = (offset_hi[..., None] + hi) + (offset_lo[..., None] + lo)
    return prefixes.reshape(lead + (blocks * block,))[..., :length]


def variation_prefixes(q: int, increments: np.ndarray) -> np.ndarray:
    """V_1..V_L for every row of a (replicas, L) increment array."""
    return compensated_cumsum(hermite_eval(q, increments))


def normalize(
    v: VariationStatistic,
    regime: Regime,
    consts: "NormalizationConstants",
) -> float:
    """
    Z_n^(1) = V_n / (c1 sqrt n) or Z_n^(2) = V_n / (c2 n^{1 - q(1-H)}).

    Raises:
        RegimeError: if the regime does not belong to (v.q, v.hurst) or the
            constant it needs is absent.
    """
    if regime.q != v.q or not math.isclose(regime.hurst, v.hurst, rel_tol=0.0, abs_tol=1e-15):
        raise RegimeError("regime does not match the statistic", q=v.q, hurst=v.hurst)
    if Regime.of(v.q, v.hurst).tag is not regime.tag:
        raise RegimeError("regime tag inconsistent with (q, H)", q=v.q, hurst=v.hurst)
    return v.value / (consts.scale(regime) * regime.normalizer(v.n))
