"""Worker pool for replica chunks with order-preserving reduction."""

import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, Tuple, TypeVar

import structlog

logger = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def chunk_ranges(total: int, chunk_size: int) -> List[Tuple[int, int]]:
    """Split range(total) into [start, stop) chunks of fixed size."""
    if chunk_size < 1:
        raise ValueError(f"chunk size must be positive, got {chunk_size}")
    return [(start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)]


def run_ordered(fn: Callable[[T], R], tasks: Sequence[T], workers: int = 1) -> List[R]:
    """
    Apply ``fn`` to every task and return results in task order.

    Tasks are independent work items whose randomness is derived from their
    own indices, so the result list is identical for any worker count.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if workers == 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]

    logger.debug("worker_pool_dispatch", workers=workers, tasks=len(tasks))
    with ProcessPoolExecutor(max_workers=workers, initializer=_worker_logging) as pool:
        return list(pool.map(fn, tasks))


def replica_chunks(total: int, path_length: int, chunk_size: int, chunk_elements: int) -> List[Tuple[int, int]]:
    """Chunk ranges for ``total`` replicas of a path, bounded in rows and in elements."""
    rows = max(1, min(chunk_size, chunk_elements // max(path_length, 1)))
    return chunk_ranges(total, rows)


def _worker_logging() -> None:
    # Worker processes must never write to stdout, which may carry a CSV table.
    structlog.configure(
        processors=[structlog.processors.add_log_level, structlog.processors.JSONRenderer()],
        wrapper_class=structlog.make_filtering_bound_logger(logging.WARNING),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
    )
