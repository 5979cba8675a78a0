from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from ncft.core.config import settings

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """
    Apply fn to every item, possibly on a thread pool, keeping input order.

    Results never depend on the schedule: each work item must carry its own
    RNG stream.
    """
    items = list(items)
    workers = max(1, threads if threads is not None else settings.THREADS)
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
