"""Deterministic optional thread parallelism.

The environment variable ``WEIGHTLAB_THREADS`` (default ``"1"``) sets the
worker count for embarrassingly parallel loops.  Work items are pure
functions of independent inputs and results are returned in input order, so
every downstream artifact is byte-identical no matter the thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from .errors import ConfigError

_T = TypeVar("_T")
_R = TypeVar("_R")

ENV_VAR = "WEIGHTLAB_THREADS"


def thread_count() -> int:
    """Worker count from the environment (validated, defaults to 1)."""
    raw = os.environ.get(ENV_VAR, "1")
    try:
        count = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from exc
    if count < 1:
        raise ConfigError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return count


def ordered_map(fn: Callable[[_T], _R], items: Iterable[_T]) -> List[_R]:
    """``[fn(x) for x in items]``, optionally on a thread pool, order kept."""
    materialized = list(items)
    workers = thread_count()
    if workers == 1 or len(materialized) <= 1:
        return [fn(item) for item in materialized]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, materialized))
