"""Thread-pool map with a fixed output order, so results never depend on the thread count."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable

ENV_VAR = "CARLESON_LAB_THREADS"
_override: int | None = None


def set_threads(count: int | None) -> None:
    global _override
    if count is not None and count < 1:
        raise ValueError("thread count must be >= 1")
    _override = count


def thread_count() -> int:
    if _override is not None:
        return _override
    env = os.environ.get(ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"{ENV_VAR} must be a positive integer, got {env!r}") from None
    return 1


def pmap(fn: Callable, items: Iterable) -> list:
    """[fn(x) for x in items], evaluated on ``thread_count()`` threads."""
    items = list(items)
    k = thread_count()
    if k == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))
