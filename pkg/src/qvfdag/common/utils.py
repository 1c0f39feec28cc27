"""Shared utility functions."""

import os
from collections.abc import Callable, Iterable, Sequence
from typing import Literal

import numpy as np
from joblib import Parallel, delayed

# Independent random streams derived from one master seed.
STREAM_RATIO = 0
STREAM_EDGES = 1
STREAM_STABILITY = 2
STREAM_SIMULATION = 3


def stream_rng(seed: int, stream: int, *index: int) -> np.random.Generator:
    """Return a generator keyed by (seed, stream, *index), independent of call order."""
    return np.random.default_rng([int(seed), int(stream), *(int(i) for i in index)])


def resolve_n_jobs(threads: int) -> int:
    """Map a thread setting (0 = all cores) onto a positive worker count."""
    if threads > 0:
        return threads
    return os.cpu_count() or 1


def parallel_map[T, R](
    func: Callable[[T], R],
    items: Iterable[T],
    *,
    n_jobs: int = 1,
    prefer: Literal["threads", "processes"] = "threads",
) -> list[R]:
    """Apply ``func`` to every item, preserving input order.

    Runs inline when ``n_jobs == 1`` so single-threaded runs carry no pool overhead.
    """
    seq: Sequence[T] = list(items)
    if n_jobs == 1 or len(seq) <= 1:
        return [func(item) for item in seq]
    results: list[R] = Parallel(n_jobs=n_jobs, prefer=prefer)(delayed(func)(item) for item in seq)
    return results
