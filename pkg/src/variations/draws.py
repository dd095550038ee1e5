"""Replicated V_n draws with per-replica streams and chunked execution."""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import structlog

from src.config import SamplingConfig, load_config
from src.sampling import RandomStream, replica_chunks, run_ordered, sample_fgn_batch
from .statistic import variation_prefixes

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class VariationTask:
    """Replicas [start, stop) of V_n read at ``lags`` off paths of ``length`` increments."""
    q: int
    hurst: float
    length: int
    seed: int
    path: Tuple[int, ...]
    start: int
    stop: int
    lags: Tuple[int, ...]
    sampling: SamplingConfig


def replica_streams(seed: int, path: Sequence[int], start: int, stop: int):
    """Streams of replicas start..stop-1 under ``RandomStream(seed).child(*path)``."""
    parent = RandomStream(seed).child(*path)
    return [parent.spawn(r) for r in range(start, stop)]


def variation_block(q: int, hurst: float, length: int, streams, sampling: SamplingConfig) -> np.ndarray:
    """V_1..V_length for one path per stream, shape (len(streams), length)."""
    increments = sample_fgn_batch(length, hurst, streams, sampling)
    return variation_prefixes(q, increments)


def variation_chunk(task: VariationTask) -> np.ndarray:
    streams = replica_streams(task.seed, task.path, task.start, task.stop)
    prefixes = variation_block(task.q, task.hurst, task.length, streams, task.sampling)
    return prefixes[:, np.asarray(task.lags, dtype=np.int64) - 1]


def variation_draws(
    q: int,
    hurst: float,
    lags: Sequence[int],
    replicas: int,
    seed: int,
    path: Sequence[int] = (),
    config: Optional[SamplingConfig] = None,
) -> np.ndarray:
    """
    V_n for every n in ``lags`` across ``replicas`` independent paths.

    One path of length max(lags) per replica serves every n: the first n
    unit-step fGn terms have the law of the standardized increments at mesh 1/n.

    Returns:
        Array of shape (replicas, len(lags)); row r depends only on (seed, path, r)
    """
    config = config or load_config().sampling
    lags = tuple(int(n) for n in lags)
    if not lags or min(lags) < 1:
        raise ValueError("lags must be positive integers")
    length = max(lags)
    tasks = [
        VariationTask(q, hurst, length, seed, tuple(path), start, stop, lags, config)
        for start, stop in replica_chunks(replicas, length, config.chunk_size, config.chunk_elements)
    ]
    logger.debug("variation_draws", q=q, hurst=hurst, length=length, replicas=replicas, chunks=len(tasks))
    blocks = run_ordered(variation_chunk, tasks, config.workers)
    return np.vstack(blocks) if blocks else np.empty((0, len(lags)))
