"""
Summary:
Order-preserving worker pool for independent numerical evaluations.
Each task runs in a copy of the caller's context so the active tolerance
set follows it into the worker thread.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from contextvars import copy_context
from typing import Callable, Iterable, TypeVar

A = TypeVar("A")
R = TypeVar("R")


def parallel_map(fn: Callable[[A], R], items: Iterable[A], jobs: int = 1) -> list[R]:
    """[fn(x) for x in items], evaluated on `jobs` threads; result order follows `items`."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(copy_context().run, fn, x) for x in items]
        return [f.result() for f in futures]
