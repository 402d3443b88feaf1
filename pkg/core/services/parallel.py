"""Bounded worker pool for independent per-item computations."""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, TypeVar

import structlog

logger = structlog.get_logger()

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """Apply func to every item, preserving order; serial when threads <= 1."""
    work: Sequence[T] = list(items)
    if threads <= 1 or len(work) <= 1:
        return [func(item) for item in work]

    workers = min(threads, len(work))
    logger.debug("Dispatching work to pool", items=len(work), workers=workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, work))


def chunked(items: Sequence[T], chunks: int) -> List[Sequence[T]]:
    """Split items into at most `chunks` contiguous slices of near-equal size."""
    if not items:
        return []
    chunks = max(1, min(chunks, len(items)))
    size, extra = divmod(len(items), chunks)
    slices = []
    start = 0
    for i in range(chunks):
        stop = start + size + (1 if i < extra else 0)
        slices.append(items[start:stop])
        start = stop
    return slices
