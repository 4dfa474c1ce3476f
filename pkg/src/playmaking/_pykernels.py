"""Numpy implementation of the interval kernels.

Used when the compiled ``_ckernels`` module is unavailable, and as the
reference the compiled version is benchmarked and tested against.
"""
from __future__ import annotations

import numpy as np


def sweep_membership(starts, ends, cols, n_cols, game_end):
    """Partition ``[0, game_end)`` at every shift boundary.

    Returns ``(bounds, member)`` where segment ``k`` is
    ``[bounds[k], bounds[k + 1])`` and ``member[k, j]`` is 1 when column
    ``j`` has a shift covering that segment.
    """
    starts = np.asarray(starts, dtype=np.int64)
    ends = np.asarray(ends, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if game_end <= 0:
        return np.zeros(1, dtype=np.int64), np.zeros((0, n_cols), dtype=np.uint8)
    bounds = np.unique(np.concatenate(([0, game_end], starts, ends)))
    n_seg = len(bounds) - 1
    si = np.searchsorted(bounds, starts)
    ei = np.searchsorted(bounds, ends)
    diff = np.zeros((n_seg + 1, n_cols), dtype=np.int32)
    np.add.at(diff, (si, cols), 1)
    np.add.at(diff, (ei, cols), -1)
    member = np.cumsum(diff[:n_seg], axis=0).astype(np.uint8)
    return bounds, member


def cooccurrence(member, weights):
    """Weighted co-occurrence ``sum_k w[k] * member[k, i] * member[k, j]``."""
    m = np.asarray(member, dtype=np.int64)
    w = np.asarray(weights, dtype=np.int64)
    return (m * w[:, None]).T @ m
