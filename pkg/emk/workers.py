"""
Bounded parallel map for independent per-face and per-piece work.

Environment variables:
  EMK_THREADS – maximum worker threads (default 1, i.e. run inline)

All shared inputs (polynomials, cones, faces) are immutable, so work items
never need locking. Results are returned in input order, which keeps every
downstream exact sum and printed document deterministic.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from loguru import logger

from emk.errors import ValidationError

T = TypeVar("T")
R = TypeVar("R")


# ── Configuration ────────────────────────────────────
def _read_threads() -> int:
    raw = os.getenv("EMK_THREADS", "1")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValidationError(f"EMK_THREADS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValidationError(f"EMK_THREADS must be at least 1, got {value}")
    return value


EMK_THREADS: int = _read_threads()


# ── Map ──────────────────────────────────────────────
def parallel_map(fn: Callable[[T], R], items: Iterable[T], *, threads: int | None = None) -> list[R]:
    """``[fn(x) for x in items]`` on at most ``threads`` workers, order preserved."""
    work = list(items)
    workers = min(threads or EMK_THREADS, len(work))
    if workers <= 1:
        return [fn(x) for x in work]
    logger.debug(f"Dispatching {len(work)} items on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="emk") as pool:
        return list(pool.map(fn, work))
