"""Deterministic thread-pool map capped by ``FRAMELET_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import InvalidInputError


def thread_count(requested: int | None = None) -> int:
    if requested:
        return max(1, int(requested))
    env = os.environ.get("FRAMELET_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InvalidInputError(f"FRAMELET_THREADS must be an integer, got {env!r}") from exc
    return min(8, os.cpu_count() or 1)


def ordered_map(fn, items, threads: int | None = None) -> list:
    """``[fn(x) for x in items]``, possibly threaded; the result order is fixed."""
    items = list(items)
    n = min(thread_count(threads), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(n) as pool:
        return list(pool.map(fn, items))
