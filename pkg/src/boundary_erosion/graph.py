"""Radius and k-nearest-neighbor graphs stored in CSR form."""

from __future__ import annotations

from typing import NamedTuple

import numba
import numpy as np

from .core import DatasetView, Metric, check_metric, pair_distance

GRAPH_FORMAT_VERSION = 1
SOURCES = ("exact", "approximate", "augmented")


class NeighborEntry(NamedTuple):
    id: int
    dist: float


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


class RnnGraph:
    """Per-sample neighbor lists sorted by ``(dist, id)``.

    ``indices[indptr[i]:indptr[i + 1]]`` are the neighbors of ``i`` and
    ``distances`` holds the matching distances. Exact graphs are symmetric;
    approximate graphs (pruned k-NN lists) need not be. Augmented graphs may
    carry entries farther than ``radius`` on rows that were topped up.
    """

    def __init__(self, indptr, indices, distances, radius, source="exact"):
        if source not in SOURCES:
            raise ValueError(f"unknown graph source {source!r}")
        self.indptr = _frozen(indptr, np.int64)
        self.indices = _frozen(indices, np.int64)
        self.distances = _frozen(distances, np.float64)
        if self.indptr.ndim != 1 or self.indptr.size < 1 or self.indptr[0] != 0:
            raise ValueError("malformed indptr")
        if self.indices.shape != self.distances.shape or self.indptr[-1] != self.indices.size:
            raise ValueError("indptr, indices and distances disagree in size")
        self.radius = float(radius)
        self.source = source
        self._validate()

    def _validate(self):
        n = self.n
        deg = np.diff(self.indptr)
        if np.any(deg < 0):
            raise ValueError("malformed indptr")
        row = np.repeat(np.arange(n), deg)
        ids, dists = self.indices, self.distances
        if ids.size and (ids.min() < 0 or ids.max() >= n):
            raise ValueError(f"neighbor id out of range for n={n}")
        if np.any(ids == row):
            raise ValueError("a sample appears in its own neighbor list")
        if not np.all(np.isfinite(dists)) or np.any(dists < 0):
            raise ValueError("neighbor distances must be finite and non-negative")
        if self.source != "augmented" and np.any(dists > self.radius):
            raise ValueError(f"neighbor farther than radius {self.radius:g} in a {self.source} graph")
        # Rows must be sorted by (dist, id) without repeats.
        same = row[1:] == row[:-1]
        step_d = dists[1:] - dists[:-1]
        bad = same & ((step_d < 0) | ((step_d == 0) & (ids[1:] <= ids[:-1])))
        if np.any(bad):
            raise ValueError("neighbor lists must be sorted by (distance, id) without duplicates")

    @classmethod
    def from_lists(cls, lists, radius, source="exact"):
        """Build from per-row sequences of ``(id, dist)`` pairs; rows are sorted here."""
        indptr = np.zeros(len(lists) + 1, dtype=np.int64)
        ids, dists = [], []
        for i, row in enumerate(lists):
            row = sorted(((float(d), int(j)) for j, d in row))
            ids.extend(j for _, j in row)
            dists.extend(d for d, _ in row)
            indptr[i + 1] = indptr[i] + len(row)
        return cls(indptr, np.array(ids, dtype=np.int64), np.array(dists), radius, source)

    @classmethod
    def from_arrays(cls, indptr, indices, distances, radius, source="exact"):
        """Build from unsorted CSR arrays, sorting every row by ``(dist, id)``."""
        indptr = np.asarray(indptr, dtype=np.int64)
        indices = np.asarray(indices, dtype=np.int64)
        distances = np.asarray(distances, dtype=np.float64)
        row = np.repeat(np.arange(indptr.size - 1), np.diff(indptr))
        order = np.lexsort((indices, distances, row))
        return cls(indptr, indices[order], distances[order], radius, source)

    @property
    def n(self) -> int:
        return self.indptr.size - 1

    def __len__(self):
        return self.n

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i):
        """``(ids, dists)`` array views for sample ``i``."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.distances[lo:hi]

    def __getitem__(self, i):
        ids, dists = self.neighbors(i)
        return [NeighborEntry(int(j), float(d)) for j, d in zip(ids, dists)]

    def lists(self):
        return [self[i] for i in range(self.n)]

    def adjacency(self):
        """Neighbor id lists without distances."""
        return [self.neighbors(i)[0].tolist() for i in range(self.n)]

    def same_lists(self, other) -> bool:
        return (
            np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.distances, other.distances)
        )

    def __repr__(self):
        return (
            f"RnnGraph(n={self.n}, edges={self.indices.size}, "
            f"radius={self.radius:g}, source={self.source!r})"
        )


class ReverseGraph:
    """``rlists[i]`` holds every ``j`` whose neighbor list contains ``i``, ascending."""

    def __init__(self, indptr, indices):
        self.indptr = _frozen(indptr, np.int64)
        self.indices = _frozen(indices, np.int64)

    @property
    def n(self) -> int:
        return self.indptr.size - 1

    def __getitem__(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]].tolist()

    def lists(self):
        return [self[i] for i in range(self.n)]

    def __eq__(self, other):
        if not isinstance(other, ReverseGraph):
            return NotImplemented
        return np.array_equal(self.indptr, other.indptr) and np.array_equal(
            self.indices, other.indices
        )

    __hash__ = None


class KnnGraph:
    """Fixed-width k-nearest-neighbor lists, each sorted by ``(dist, id)``."""

    def __init__(self, indices, distances):
        indices = np.asarray(indices, dtype=np.int64)
        distances = np.asarray(distances, dtype=np.float64)
        if indices.ndim != 2 or indices.shape != distances.shape:
            raise ValueError("k-NN indices and distances must be matching 2-D arrays")
        self.indices = _frozen(indices, np.int64)
        self.distances = _frozen(distances, np.float64)

    @property
    def n(self) -> int:
        return self.indices.shape[0]

    @property
    def k(self) -> int:
        return self.indices.shape[1]

    def __getitem__(self, i):
        return [NeighborEntry(int(j), float(d)) for j, d in zip(self.indices[i], self.distances[i])]

    def to_rnn(self, radius=np.inf, source="approximate"):
        n, k = self.indices.shape
        return RnnGraph(
            np.arange(n + 1, dtype=np.int64) * k,
            self.indices.ravel(),
            self.distances.ravel(),
            radius,
            source,
        )


# -- exact construction -----------------------------------------------------


@numba.njit(cache=True)
def _next_within(data, kind, radius, i, j):
    # Store-free scan; keeping writes out of this loop lets LLVM optimize it.
    n = data.shape[0]
    while j < n:
        if pair_distance(data, i, j, kind) <= radius:
            return j
        j += 1
    return n


@numba.njit(cache=True)
def _radius_edges(data, kind, radius):
    # Half loop: pair_distance is bitwise symmetric, so each pair is evaluated once.
    n = data.shape[0]
    src = np.empty(max(16, 4 * n), dtype=np.int64)
    dst = np.empty_like(src)
    val = np.empty(src.size, dtype=np.float64)
    m = 0
    for i in range(n):
        j = _next_within(data, kind, radius, i, i + 1)
        while j < n:
            if m == src.size:
                src = _grow(src, 2 * m)
                dst = _grow(dst, 2 * m)
                val = _grow(val, 2 * m)
            src[m] = i
            dst[m] = j
            val[m] = pair_distance(data, i, j, kind)
            m += 1
            j = _next_within(data, kind, radius, i, j + 1)
    return src[:m], dst[:m], val[:m]


@numba.njit(cache=True)
def _grow(a, cap):
    out = np.empty(cap, dtype=a.dtype)
    out[: a.size] = a
    return out


@numba.njit(cache=True)
def _edges_to_csr(n, src, dst, val):
    indptr = np.zeros(n + 1, dtype=np.int64)
    for e in range(src.size):
        indptr[src[e] + 1] += 1
        indptr[dst[e] + 1] += 1
    for i in range(n):
        indptr[i + 1] += indptr[i]
    fill = indptr[:n].copy()
    indices = np.empty(indptr[n], dtype=np.int64)
    dists = np.empty(indptr[n], dtype=np.float64)
    # Edges arrive sorted by (src, dst); scattering both directions keeps
    # every row in ascending id order before the stable distance sort.
    for e in range(src.size):
        i = src[e]
        j = dst[e]
        indices[fill[j]] = i
        dists[fill[j]] = val[e]
        fill[j] += 1
    for e in range(src.size):
        i = src[e]
        j = dst[e]
        indices[fill[i]] = j
        dists[fill[i]] = val[e]
        fill[i] += 1
    for i in range(n):
        lo = indptr[i]
        hi = indptr[i + 1]
        if hi - lo > 1:
            order = np.argsort(dists[lo:hi], kind="mergesort")
            indices[lo:hi] = indices[lo:hi][order]
            dists[lo:hi] = dists[lo:hi][order]
    return indptr, indices, dists


def build_exact_rnn(view: DatasetView, metric: Metric, r: float) -> RnnGraph:
    """All pairs within distance ``r`` by brute force, ``O(d n^2)``."""
    if not r >= 0:
        raise ValueError(f"radius must be non-negative, got {r}")
    check_metric(view, metric)
    src, dst, val = _radius_edges(view.data, metric.code, float(r))
    indptr, indices, dists = _edges_to_csr(view.n, src, dst, val)
    return RnnGraph(indptr, indices, dists, r, "exact")


@numba.njit(cache=True)
def _worse(d1, j1, d2, j2):
    return d1 > d2 or (d1 == d2 and j1 > j2)


@numba.njit(cache=True)
def _next_better(data, kind, i, j, bound_d, bound_j):
    # First j' >= j (j' != i) that beats (bound_d, bound_j); same store-free scan.
    n = data.shape[0]
    while j < n:
        if j != i:
            d = pair_distance(data, i, j, kind)
            if d < bound_d or (d == bound_d and j < bound_j):
                return j
        j += 1
    return n


@numba.njit(cache=True)
def _sift(hd, hi, pos):
    # Max-heap sift-down on (dist, id).
    k = hd.size
    d = hd[pos]
    j = hi[pos]
    while True:
        child = 2 * pos + 1
        if child >= k:
            break
        if child + 1 < k and _worse(hd[child + 1], hi[child + 1], hd[child], hi[child]):
            child += 1
        if not _worse(hd[child], hi[child], d, j):
            break
        hd[pos] = hd[child]
        hi[pos] = hi[child]
        pos = child
    hd[pos] = d
    hi[pos] = j


@numba.njit(cache=True)
def _topk_rows(data, kind, rows, k):
    # Bounded max-heap on (dist, id) per row, then a final sort.
    n = data.shape[0]
    out_idx = np.empty((rows.size, k), dtype=np.int64)
    out_dist = np.empty((rows.size, k), dtype=np.float64)
    for t in range(rows.size):
        i = rows[t]
        hd = out_dist[t]
        hi = out_idx[t]
        j = 0
        size = 0
        while size < k:
            if j != i:
                hd[size] = pair_distance(data, i, j, kind)
                hi[size] = j
                size += 1
            j += 1
        for s in range(k // 2 - 1, -1, -1):
            _sift(hd, hi, s)
        j = _next_better(data, kind, i, j, hd[0], hi[0])
        while j < n:
            hd[0] = pair_distance(data, i, j, kind)
            hi[0] = j
            _sift(hd, hi, 0)
            j = _next_better(data, kind, i, j + 1, hd[0], hi[0])
        # Heap -> ascending (dist, id): ids first, then a stable sort on distance.
        order = np.argsort(hi)
        hi[:] = hi[order]
        hd[:] = hd[order]
        order = np.argsort(hd, kind="mergesort")
        hi[:] = hi[order]
        hd[:] = hd[order]
    return out_idx, out_dist


def exact_top_k(view: DatasetView, metric: Metric, k: int, rows=None):
    """Brute-force ``k`` nearest neighbors for ``rows`` (all samples by default)."""
    check_metric(view, metric)
    if not 1 <= k < view.n:
        raise ValueError(f"k must satisfy 1 <= k < n={view.n}, got {k}")
    rows = np.arange(view.n) if rows is None else np.asarray(rows, dtype=np.int64)
    return _topk_rows(view.data, metric.code, rows, int(k))


def build_exact_knn(view: DatasetView, metric: Metric, k: int) -> KnnGraph:
    return KnnGraph(*exact_top_k(view, metric, k))


# -- derived graphs -----------------------------------------------------------


def prune_knn_to_rnn(knn: KnnGraph, r: float) -> RnnGraph:
    """Keep the entries of each k-NN list that lie within ``r``, in order."""
    keep = knn.distances <= r
    indptr = np.zeros(knn.n + 1, dtype=np.int64)
    np.cumsum(keep.sum(axis=1), out=indptr[1:])
    return RnnGraph(indptr, knn.indices[keep], knn.distances[keep], r, "approximate")


def build_reverse(g: RnnGraph) -> ReverseGraph:
    """Invert the neighbor relation: ``j in rev[i]`` iff ``i in g[j]``."""
    n = g.n
    sources = np.repeat(np.arange(n, dtype=np.int64), g.degrees())
    # Stable sort by target keeps sources ascending within each reverse list.
    order = np.argsort(g.indices, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(g.indices, minlength=n), out=indptr[1:])
    return ReverseGraph(indptr, sources[order])


def augment_rnn(g: RnnGraph, view: DatasetView, metric: Metric, k: int, knn_source=None) -> RnnGraph:
    """Replace every list shorter than ``k`` by the sample's top-``k`` neighbors.

    Top-k lists come from a brute-force scan, or from ``knn_source`` (a
    :class:`KnnGraph` with at least ``k`` columns) when given.
    """
    if not 1 <= k < g.n:
        raise ValueError(f"augmentation k must satisfy 1 <= k < n={g.n}, got {k}")
    if view.n != g.n:
        raise ValueError("graph and dataset sizes differ")
    deg = g.degrees()
    short = np.flatnonzero(deg < k)
    if short.size == 0:
        return RnnGraph(g.indptr, g.indices, g.distances, g.radius, "augmented")
    if knn_source is None:
        top_idx, top_dist = exact_top_k(view, metric, k, short)
    else:
        if knn_source.n != g.n:
            raise ValueError("k-NN source size differs from graph size")
        if knn_source.k < k:
            raise ValueError(f"k-NN source has {knn_source.k} columns, need at least {k}")
        top_idx = knn_source.indices[short, :k]
        top_dist = knn_source.distances[short, :k]

    new_deg = deg.copy()
    new_deg[short] = k
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(new_deg, out=indptr[1:])
    indices = np.empty(indptr[-1], dtype=np.int64)
    dists = np.empty(indptr[-1], dtype=np.float64)
    is_short = np.zeros(g.n, dtype=bool)
    is_short[short] = True
    # Copy untouched rows in bulk through a mask on the old edge array.
    old_rows = np.repeat(np.arange(g.n), deg)
    new_rows = np.repeat(np.arange(g.n), new_deg)
    keep_old = ~is_short[old_rows]
    keep_new = ~is_short[new_rows]
    indices[keep_new] = g.indices[keep_old]
    dists[keep_new] = g.distances[keep_old]
    indices[~keep_new] = top_idx.ravel()
    dists[~keep_new] = top_dist.ravel()
    return RnnGraph(indptr, indices, dists, g.radius, "augmented")


def graph_recall(approx: KnnGraph, exact: KnnGraph) -> float:
    """Mean fraction of each exact k-NN list recovered by ``approx``."""
    if approx.indices.shape != exact.indices.shape:
        raise ValueError(
            f"graph shapes differ: {approx.indices.shape} vs {exact.indices.shape}"
        )
    hits = 0
    for a, e in zip(approx.indices, exact.indices):
        hits += np.intersect1d(a, e, assume_unique=True).size
    return hits / exact.indices.size


# -- text serialization -------------------------------------------------------


def write_graph(g: RnnGraph, path):
    """One line per sample of space-separated ``id:dist`` pairs after a header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"# boundary-erosion graph v{GRAPH_FORMAT_VERSION} n={g.n} "
            f"radius={g.radius!r} source={g.source}\n"
        )
        for i in range(g.n):
            ids, dists = g.neighbors(i)
            fh.write(" ".join(f"{j}:{float(d)!r}" for j, d in zip(ids, dists)))
            fh.write("\n")


def read_graph(path) -> RnnGraph:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) < 3 or header[:3] != ["#", "boundary-erosion", "graph"]:
            raise ValueError(f"{path}: not a graph file")
        if header[3] != f"v{GRAPH_FORMAT_VERSION}":
            raise ValueError(f"{path}: unsupported graph format {header[3]}")
        meta = dict(field.split("=", 1) for field in header[4:])
        n = int(meta["n"])
        lists = []
        for line in fh:
            lists.append([
                (int(j), float(d)) for j, d in (tok.split(":") for tok in line.split())
            ])
    if len(lists) != n:
        raise ValueError(f"{path}: header says n={n} but found {len(lists)} rows")
    return RnnGraph.from_lists(lists, float(meta["radius"]), meta.get("source", "exact"))
