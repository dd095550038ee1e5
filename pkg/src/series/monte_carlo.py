"""Monte Carlo estimation of the truncated series."""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import structlog
from scipy.optimize import brentq

from src.config import Config, SamplingConfig, load_config
from src.errors import BudgetExceeded, FbmVarError
from src.limitlaws import wilson_interval
from src.sampling import RandomStream, replica_chunks, run_ordered
from src.variations import NormalizationConstants, replica_streams, variation_block, variation_draws
from .kinds import SeriesKind, bands_for
from .truncation import choose_n_trunc

logger = structlog.get_logger(__name__)

MIN_TAIL_REPLICAS = 100


@dataclass(frozen=True)
class TailProbability:
    """P(|V_n| > threshold) estimated from ``replicas`` independent paths."""
    p_hat: float
    ci: Tuple[float, float]
    hits: int
    replicas: int


def tail_prob_mc(
    q: int,
    hurst: float,
    n: int,
    threshold: float,
    replicas: int,
    rng: RandomStream,
    config: Optional[Config] = None,
) -> TailProbability:
    """Binomial estimate with a Wilson 95% interval; replica r reads ``rng.spawn(r)``."""
    config = config or load_config()
    if replicas < MIN_TAIL_REPLICAS:
        raise FbmVarError(f"tail estimates need at least {MIN_TAIL_REPLICAS} replicas", replicas=replicas)
    v = variation_draws(q, hurst, [n], replicas, rng.seed, config=config.sampling)[:, 0]
    hits = int(np.count_nonzero(np.abs(v) > threshold))
    return TailProbability(hits / replicas, wilson_interval(hits, replicas), hits, replicas)


@dataclass(frozen=True)
class ReplicaBand:
    """n in [lo, hi] estimated from ``replicas`` shared paths of length hi."""
    index: int
    lo: int
    hi: int
    replicas: int

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    @property
    def pairs(self) -> int:
        return self.size * self.replicas


def replica_schedule(kind: SeriesKind, n_trunc: int, budget: int, config: Optional[Config] = None) -> List[ReplicaBand]:
    """
    replicas(n) proportional to w(n)^{2/3}, at least the configured minimum,
    scaled so that sum_n replicas(n) fills ``budget``.

    Replica counts are constant on dyadic bands of n and set by the band's
    first (heaviest) weight.

    Raises:
        BudgetExceeded: if the minimum allocation alone exceeds the budget.
    """
    config = config or load_config()
    series = config.series
    bands = bands_for(n_trunc)
    sizes = np.array([hi - lo + 1 for lo, hi in bands], dtype=np.float64)
    shape = np.array([float(kind.weight(lo)) ** (2.0 / 3.0) for lo, _ in bands])
    floor, cap = series.min_replicas, series.max_replicas_per_n

    minimum = int(sizes.sum()) * floor
    if minimum > budget:
        raise BudgetExceeded(
            "epsilon too small for the replica budget",
            n_trunc=n_trunc, replicas_needed=minimum, budget=budget,
        )

    def allocation(scale: float) -> np.ndarray:
        return np.clip(np.floor(scale * shape), floor, cap)

    def excess(scale: float) -> float:
        return float(np.dot(sizes, allocation(scale))) - budget

    if excess(cap / shape.min()) <= 0:
        counts = allocation(cap / shape.min())
    else:
        scale = brentq(excess, 0.0, cap / shape.min(), xtol=1e-6)
        counts = allocation(scale)
        # The step function may overshoot at the root; back off band by band.
        while float(np.dot(sizes, counts)) > budget:
            counts = np.maximum(counts - 1.0, floor)

    return [
        ReplicaBand(index=j, lo=lo, hi=hi, replicas=int(r))
        for j, ((lo, hi), r) in enumerate(zip(bands, counts))
    ]


@dataclass(frozen=True)
class BandTask:
    """Replicas [start, stop) of one band at one epsilon."""
    q: int
    hurst: float
    seed: int
    band: ReplicaBand
    start: int
    stop: int
    eps: float
    weight_power: int
    threshold_power: float
    sampling: SamplingConfig


def band_chunk(task: BandTask) -> np.ndarray:
    """Per-replica totals sum_{n in band} w(n) 1{|V_n| > threshold(eps, n)}."""
    band = task.band
    streams = replica_streams(task.seed, (band.index,), task.start, task.stop)
    prefixes = variation_block(task.q, task.hurst, band.hi, streams, task.sampling)
    v = prefixes[:, band.lo - 1:band.hi]
    n = np.arange(band.lo, band.hi + 1, dtype=np.float64)
    thresholds = task.eps * n ** task.threshold_power
    weights = n ** -float(task.weight_power)
    return np.sum((np.abs(v) > thresholds) * weights, axis=1)


@dataclass(frozen=True)
class SeriesEstimate:
    """Truncated series value with its Monte Carlo and truncation errors."""
    kind: SeriesKind
    eps: float
    value: float
    mc_stderr: float
    n_trunc: int
    remainder_bound: float
    moment_order: int
    replicas_per_n: Tuple[ReplicaBand, ...] = field(default_factory=tuple)

    @property
    def total_pairs(self) -> int:
        return sum(band.pairs for band in self.replicas_per_n)

    def schedule(self) -> List[dict]:
        return [{"lo": b.lo, "hi": b.hi, "replicas": b.replicas} for b in self.replicas_per_n]


def estimate_series(
    kind: SeriesKind,
    eps: float,
    tol: Optional[float] = None,
    consts: Optional[NormalizationConstants] = None,
    rng: Optional[RandomStream] = None,
    budget: Optional[int] = None,
    config: Optional[Config] = None,
) -> SeriesEstimate:
    """
    sum_{n <= N_trunc} w(n) P(|V_n| > threshold(eps, n)) by Monte Carlo.

    N_trunc is the first N whose certified remainder is within ``tol``. Replicas
    of band j read streams ``rng.child(j, r)``, so the estimate depends only on
    the seed and is identical for every worker count and every epsilon uses
    common random numbers.

    Raises:
        BudgetExceeded: if N_trunc or the minimum replica allocation is beyond the caps.
    """
    config = config or load_config()
    tol = tol if tol is not None else config.series.tolerance
    budget = budget if budget is not None else config.series.budget
    rng = rng or RandomStream(config.series.seed)
    if tol <= 0:
        raise FbmVarError(f"tolerance must be positive, got {tol}", tol=tol)
    if consts is not None and (consts.q, consts.hurst) != (kind.q, kind.hurst):
        raise FbmVarError("constants belong to a different (q, H)", q=consts.q, hurst=consts.hurst)

    truncation = choose_n_trunc(kind, eps, tol, config)
    if truncation.n > config.series.max_n_trunc:
        raise BudgetExceeded(
            "epsilon too small: truncation point beyond the configured cap",
            n_trunc=truncation.n,
            replicas_needed=truncation.n * config.series.min_replicas,
            budget=budget,
        )

    bands = replica_schedule(kind, truncation.n, budget, config)
    sampling = config.sampling
    tasks = [
        BandTask(kind.q, kind.hurst, rng.seed, band, start, stop, eps,
                 kind.weight_power, kind.threshold_power, sampling)
        for band in bands
        for start, stop in replica_chunks(band.replicas, band.hi, sampling.chunk_size, sampling.chunk_elements)
    ]
    logger.info(
        "series_estimate_start",
        kind=kind.tag.value, eps=eps, n_trunc=truncation.n, bands=len(bands),
        pairs=sum(b.pairs for b in bands), chunks=len(tasks), workers=sampling.workers,
    )
    totals = run_ordered(band_chunk, tasks, sampling.workers)

    means, variances = [], []
    offset = 0
    for band in bands:
        block = np.concatenate(totals[offset:offset + _chunks_in(band, sampling)])
        offset += _chunks_in(band, sampling)
        means.append(math.fsum(block) / band.replicas)
        variances.append(float(np.var(block, ddof=1)) / band.replicas if band.replicas > 1 else 0.0)

    estimate = SeriesEstimate(
        kind=kind,
        eps=eps,
        value=math.fsum(means),
        mc_stderr=math.sqrt(math.fsum(variances)),
        n_trunc=truncation.n,
        remainder_bound=truncation.value,
        moment_order=truncation.p,
        replicas_per_n=tuple(bands),
    )
    logger.info("series_estimate_done", kind=kind.tag.value, eps=eps, value=estimate.value, mc_stderr=estimate.mc_stderr)
    return estimate


def _chunks_in(band: ReplicaBand, sampling: SamplingConfig) -> int:
    return len(replica_chunks(band.replicas, band.hi, sampling.chunk_size, sampling.chunk_elements))
