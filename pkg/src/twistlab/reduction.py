"""Deterministic pairwise summation with a fixed reduction tree.

The input is cut into leaves of LEAF_SIZE consecutive terms. Each leaf is
summed with ``np.sum`` on a contiguous slice, which is deterministic for a
fixed length, and the leaf sums are combined level by level as
``(s0 + s1), (s2 + s3), ...`` with an odd trailing entry carried upward.
The tree shape depends only on the input length, so the result is
bit-identical whatever the number of worker threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

LEAF_SIZE = 4096


def _leaf_sums(values: np.ndarray, leaf: int, threads: int) -> np.ndarray:
    n = len(values)
    starts = range(0, n, leaf)
    if threads <= 1 or n <= leaf:
        return np.array([np.sum(values[s : s + leaf]) for s in starts], dtype=values.dtype)

    def work(s):
        return np.sum(values[s : s + leaf])

    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map preserves input order, so placement never depends on scheduling
        return np.array(list(pool.map(work, starts)), dtype=values.dtype)


def _combine(partials: np.ndarray) -> complex | float:
    level = partials
    while len(level) > 1:
        paired = level[: len(level) // 2 * 2]
        nxt = paired[0::2] + paired[1::2]
        if len(level) % 2:
            nxt = np.append(nxt, level[-1])
        level = nxt
    return level[0]


def tree_sum(values, *, leaf: int = LEAF_SIZE, threads: int = 1):
    """Sum a 1-d array with the fixed-shape pairwise tree."""
    arr = np.ascontiguousarray(values)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size == 0:
        return arr.dtype.type(0)
    return _combine(_leaf_sums(arr, leaf, threads))
