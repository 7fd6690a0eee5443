"""Chunked work distribution with order-preserving merge."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")


def chunk_ranges(total: int, size: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def map_tasks(fn: Callable[..., T], tasks: Sequence[tuple], threads: int = 1) -> list[T]:
    """Run ``fn(*task)`` for every task; results come back in task order.

    ``fn`` must be a module-level function when ``threads > 1`` (it is
    shipped to worker processes).
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if threads == 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, *zip(*tasks)))
