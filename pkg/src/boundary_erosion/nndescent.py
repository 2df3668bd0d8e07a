"""Approximate k-NN graph construction by NN-Descent (neighbor-of-neighbor joins).

Runs single-threaded so that a fixed seed reproduces the same graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .core import DatasetView, Metric, check_metric, pair_distance
from .graph import KnnGraph


@dataclass(frozen=True)
class NnDescentParams:
    k: int = 10
    sample_rate: float = 1.0
    termination_delta: float = 0.001
    max_iters: int = 30
    seed: int = 0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if not 0.0 < self.sample_rate <= 1.0:
            raise ValueError(f"sample_rate must lie in (0, 1], got {self.sample_rate}")
        if not 0.0 < self.termination_delta < 1.0:
            raise ValueError(
                f"termination_delta must lie in (0, 1), got {self.termination_delta}"
            )
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**32:
            raise ValueError(f"seed must be an unsigned 32-bit integer, got {self.seed}")


@numba.njit(cache=True)
def _sift_down(keys, vals, flags, pos):
    # Max-heap on keys; vals/flags ride along.
    size = keys.shape[0]
    while True:
        left = 2 * pos + 1
        right = left + 1
        largest = pos
        if left < size and keys[left] > keys[largest]:
            largest = left
        if right < size and keys[right] > keys[largest]:
            largest = right
        if largest == pos:
            return
        keys[pos], keys[largest] = keys[largest], keys[pos]
        vals[pos], vals[largest] = vals[largest], vals[pos]
        flags[pos], flags[largest] = flags[largest], flags[pos]
        pos = largest


@numba.njit(cache=True)
def _heap_push(keys, vals, flags, key, val, flag):
    """Insert ``val`` if it beats the current worst and is not already present."""
    if key >= keys[0]:
        return 0
    for t in range(vals.shape[0]):
        if vals[t] == val:
            return 0
    keys[0] = key
    vals[0] = val
    flags[0] = flag
    _sift_down(keys, vals, flags, 0)
    return 1


@numba.njit(cache=True)
def _random_init(data, kind, k, ids, dists, flags):
    n = data.shape[0]
    for i in range(n):
        if 2 * k >= n:
            perm = np.random.permutation(n)
            for j in perm:
                if j != i:
                    _heap_push(dists[i], ids[i], flags[i], pair_distance(data, i, j, kind), j, 1)
        else:
            filled = 0
            while filled < k:
                j = np.random.randint(0, n)
                if j == i:
                    continue
                filled += _heap_push(
                    dists[i], ids[i], flags[i], pair_distance(data, i, j, kind), j, 1
                )


@numba.njit(cache=True)
def _sample_into(pri, ids, j):
    # Reservoir-style sampling: keep the entries with the smallest random priorities.
    dummy = np.zeros(ids.shape[0], dtype=np.uint8)
    _heap_push(pri, ids, dummy, np.random.random(), j, 0)


@numba.njit(cache=True)
def _union(a, b, width):
    out = np.full(width, -1, dtype=np.int64)
    m = 0
    for src in (a, b):
        for x in src:
            if x < 0:
                continue
            dup = False
            for t in range(m):
                if out[t] == x:
                    dup = True
                    break
            if not dup:
                out[m] = x
                m += 1
    return out


@numba.njit(cache=True)
def _build_candidates(ids, flags, sample):
    """Forward lists: ``sample`` flagged (new) entries plus every old entry.
    Reverse lists are each subsampled to ``sample`` and merged in."""
    n, k = ids.shape
    fwd_new = np.full((n, sample), -1, dtype=np.int64)
    fwd_new_pri = np.full((n, sample), np.inf)
    fwd_old = np.full((n, k), -1, dtype=np.int64)
    for i in range(n):
        m = 0
        for t in range(k):
            j = ids[i, t]
            if j < 0:
                continue
            if flags[i, t]:
                _sample_into(fwd_new_pri[i], fwd_new[i], j)
            else:
                fwd_old[i, m] = j
                m += 1
    # Sampled new entries become old for the next round.
    for i in range(n):
        for t in range(k):
            if flags[i, t]:
                for c in range(sample):
                    if fwd_new[i, c] == ids[i, t]:
                        flags[i, t] = 0
                        break
    rev_new = np.full((n, sample), -1, dtype=np.int64)
    rev_new_pri = np.full((n, sample), np.inf)
    rev_old = np.full((n, sample), -1, dtype=np.int64)
    rev_old_pri = np.full((n, sample), np.inf)
    for i in range(n):
        for c in range(sample):
            j = fwd_new[i, c]
            if j >= 0:
                _sample_into(rev_new_pri[j], rev_new[j], i)
        for c in range(k):
            j = fwd_old[i, c]
            if j >= 0:
                _sample_into(rev_old_pri[j], rev_old[j], i)
    new_ids = np.empty((n, 2 * sample), dtype=np.int64)
    old_ids = np.empty((n, k + sample), dtype=np.int64)
    for i in range(n):
        new_ids[i] = _union(fwd_new[i], rev_new[i], 2 * sample)
        old_ids[i] = _union(fwd_old[i], rev_old[i], k + sample)
    return new_ids, old_ids


@numba.njit(cache=True)
def _local_join(data, kind, ids, dists, flags, new_ids, old_ids):
    n = data.shape[0]
    m = new_ids.shape[1]
    m_old = old_ids.shape[1]
    updates = 0
    for v in range(n):
        for a in range(m):
            p = new_ids[v, a]
            if p < 0:
                continue
            for b in range(a + 1, m):
                q = new_ids[v, b]
                if q < 0 or q == p:
                    continue
                d = pair_distance(data, p, q, kind)
                updates += _heap_push(dists[p], ids[p], flags[p], d, q, 1)
                updates += _heap_push(dists[q], ids[q], flags[q], d, p, 1)
            for b in range(m_old):
                q = old_ids[v, b]
                if q < 0 or q == p:
                    continue
                d = pair_distance(data, p, q, kind)
                updates += _heap_push(dists[p], ids[p], flags[p], d, q, 1)
                updates += _heap_push(dists[q], ids[q], flags[q], d, p, 1)
    return updates


@numba.njit(cache=True)
def _nndescent(data, kind, k, sample, delta, max_iters, seed):
    np.random.seed(seed)
    n = data.shape[0]
    ids = np.full((n, k), -1, dtype=np.int64)
    dists = np.full((n, k), np.inf)
    flags = np.zeros((n, k), dtype=np.uint8)
    _random_init(data, kind, k, ids, dists, flags)
    iters = 0
    for _ in range(max_iters):
        iters += 1
        new_ids, old_ids = _build_candidates(ids, flags, sample)
        updates = _local_join(data, kind, ids, dists, flags, new_ids, old_ids)
        if updates < delta * n * k:
            break
    return ids, dists, iters


def build_nndescent_knn(view: DatasetView, metric: Metric, params: NnDescentParams | None = None, **kwargs) -> KnnGraph:
    """Approximate k-NN graph; keyword arguments override ``params`` fields."""
    if params is None:
        params = NnDescentParams(**kwargs)
    elif kwargs:
        params = NnDescentParams(**{**params.__dict__, **kwargs})
    check_metric(view, metric)
    if params.k >= view.n:
        raise ValueError(f"k={params.k} must be smaller than n={view.n}")
    sample = max(1, int(round(params.sample_rate * params.k)))
    ids, dists, _ = _nndescent(
        view.data,
        metric.code,
        int(params.k),
        sample,
        float(params.termination_delta),
        int(params.max_iters),
        int(params.seed),
    )
    order = np.lexsort((ids, dists), axis=-1)
    return KnnGraph(
        np.take_along_axis(ids, order, axis=1), np.take_along_axis(dists, order, axis=1)
    )
