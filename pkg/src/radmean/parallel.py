"""Order-preserving parallel map; ``RMB_THREADS`` caps the worker count."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
U = TypeVar("U")


def n_threads() -> int:
    raw = os.environ.get("RMB_THREADS")
    cap = os.cpu_count() or 1
    if raw:
        try:
            cap = max(1, int(raw))
        except ValueError:
            raise ValueError(f"RMB_THREADS must be a positive integer, got {raw!r}") from None
    return cap


def pmap(fn: Callable[[T], U], items: Iterable[T]) -> list[U]:
    """``[fn(x) for x in items]``, possibly threaded; results keep input order."""
    items = list(items)
    k = min(n_threads(), len(items))
    if k <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))
