"""Boundary erosion: peel samples off in order of dynamic boundary density.

The surviving set is kept in a binary min-heap of packed ``(rho*, id)``
keys. A decrement pushes a fresh key and leaves the old one behind; stale
keys are recognised on pop by comparing against the live ``rho*`` value.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numba
import numpy as np

from .graph import ReverseGraph, RnnGraph, build_reverse


@dataclass
class BoundaryLevels:
    """Erosion output.

    Attributes
    ----------
    level : ndarray of int64
        Boundary level of each sample, ``1..max_level`` without gaps.
        Higher means eroded later, i.e. further inside a cluster.
    batches : list of ndarray
        ``batches[l - 1]`` holds the ids removed together at level ``l``,
        ascending.
    batch_min : ndarray of int64
        Dynamic density shared by the members of each batch when removed.
    initial_rho : ndarray of int64
        Neighbor-list sizes before erosion started.
    """

    level: np.ndarray
    batches: list = field(repr=False)
    batch_min: np.ndarray = field(repr=False)
    initial_rho: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.level.size

    @property
    def max_level(self) -> int:
        return len(self.batches)

    def order(self) -> np.ndarray:
        """Removal order, batch by batch."""
        return np.concatenate(self.batches) if self.batches else np.empty(0, dtype=np.int64)

    def to_csv(self, path):
        """Write ``id,level,initial_rho`` rows for plotting."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["id", "level", "initial_rho"])
            for i in range(self.n):
                writer.writerow([i, int(self.level[i]), int(self.initial_rho[i])])


@numba.njit(cache=True)
def _push(heap, size, key):
    pos = size
    heap[pos] = key
    while pos > 0:
        parent = (pos - 1) >> 1
        if heap[parent] <= key:
            break
        heap[pos] = heap[parent]
        pos = parent
    heap[pos] = key
    return size + 1


@numba.njit(cache=True)
def _pop(heap, size):
    top = heap[0]
    size -= 1
    last = heap[size]
    pos = 0
    while True:
        child = 2 * pos + 1
        if child >= size:
            break
        if child + 1 < size and heap[child + 1] < heap[child]:
            child += 1
        if heap[child] >= last:
            break
        heap[pos] = heap[child]
        pos = child
    if size > 0:
        heap[pos] = last
    return top, size


@numba.njit(cache=True)
def _erode(degree, rev_indptr, rev_indices, record):
    n = degree.size
    rho = degree.copy()
    alive = np.ones(n, dtype=np.bool_)
    heap = np.empty(n + rev_indices.size, dtype=np.int64)
    # A sorted array already satisfies the heap property.
    heap[:n] = np.sort(rho * n + np.arange(n))
    size = n

    order = np.empty(n, dtype=np.int64)
    batch_ptr = np.zeros(n + 1, dtype=np.int64)
    batch_min = np.empty(n, dtype=np.int64)
    snapshots = np.empty((n if record else 0, n), dtype=np.int64)
    n_batches = 0
    removed = 0

    while removed < n:
        if record:
            for i in range(n):
                snapshots[n_batches, i] = rho[i] if alive[i] else -1
        m = -1
        start = removed
        while size > 0:
            key = heap[0]
            r = key // n
            i = key - r * n
            if not alive[i] or rho[i] != r:
                _, size = _pop(heap, size)
                continue
            if m == -1:
                m = r
            elif r != m:
                break
            _, size = _pop(heap, size)
            alive[i] = False
            order[removed] = i
            removed += 1
        # Every member is out of the queue before any neighbor is touched.
        for t in range(start, removed):
            x = order[t]
            for p in range(rev_indptr[x], rev_indptr[x + 1]):
                j = rev_indices[p]
                if alive[j]:
                    rho[j] -= 1
                    size = _push(heap, size, rho[j] * n + j)
        batch_min[n_batches] = m
        n_batches += 1
        batch_ptr[n_batches] = removed

    return order, batch_ptr[: n_batches + 1], batch_min[:n_batches], snapshots[:n_batches]


def _check_reverse(g: RnnGraph, rev: ReverseGraph):
    if rev.n != g.n or rev != build_reverse(g):
        raise ValueError("reverse graph does not match the neighbor graph")


def _run(g, rev, check, record):
    if rev is None:
        rev = build_reverse(g)
    elif check:
        _check_reverse(g, rev)
    degree = g.degrees().astype(np.int64)
    order, batch_ptr, batch_min, snapshots = _erode(degree, rev.indptr, rev.indices, record)
    batches = [order[batch_ptr[b]:batch_ptr[b + 1]] for b in range(batch_min.size)]
    level = np.empty(g.n, dtype=np.int64)
    for b, ids in enumerate(batches):
        level[ids] = b + 1
    levels = BoundaryLevels(level, batches, batch_min, degree)
    return levels, snapshots


def erode(g: RnnGraph, rev: ReverseGraph | None = None, *, check: bool = False) -> BoundaryLevels:
    """Assign boundary levels by repeatedly removing all minimum-``rho*`` samples.

    Parameters
    ----------
    g : RnnGraph
        Neighbor graph; the initial ``rho*`` of sample ``i`` is ``len(g[i])``.
    rev : ReverseGraph, optional
        ``build_reverse(g)``; built here when omitted.
    check : bool
        Verify that ``rev`` matches ``g`` before eroding.
    """
    return _run(g, rev, check, False)[0]


def rho_star_trace(g: RnnGraph, rev: ReverseGraph | None = None, *, snapshots: bool = False):
    """Per-batch ``(ids, m)`` pairs, with ``m`` the batch's shared ``rho*``.

    With ``snapshots=True`` also returns a ``(batches, n)`` array holding
    the ``rho*`` vector right before each batch (-1 for removed samples).
    """
    levels, snaps = _run(g, rev, False, snapshots)
    trace = [(ids, int(m)) for ids, m in zip(levels.batches, levels.batch_min)]
    return (trace, snaps) if snapshots else trace
