"""Dataset views, distance evaluation and static neighborhood density."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numba
import numpy as np

if "NUMBA_THREADING_LAYER" not in os.environ:
    # Skip the TBB probe, which warns on older system TBB builds.
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

EUCLIDEAN = 0
COSINE = 1
PRECOMPUTED = 2

METRICS = {"euclidean": EUCLIDEAN, "cosine": COSINE, "precomputed": PRECOMPUTED}


def configure_threads(value=None):
    """Cap numba's thread pool from ``ERODE_THREADS`` (0 or unset means auto)."""
    if value is None:
        value = os.environ.get("ERODE_THREADS", "0")
    try:
        n = int(value)
    except ValueError:
        raise ValueError(f"ERODE_THREADS must be an integer, got {value!r}")
    if n < 0:
        raise ValueError("ERODE_THREADS must be non-negative")
    if n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    return numba.get_num_threads()


@dataclass(frozen=True)
class Metric:
    """Distance kind: ``euclidean``, ``cosine`` (1 - cosine similarity) or ``precomputed``."""

    kind: str = "euclidean"

    def __post_init__(self):
        if self.kind not in METRICS:
            raise ValueError(f"unknown metric {self.kind!r}; expected one of {sorted(METRICS)}")

    @property
    def code(self) -> int:
        return METRICS[self.kind]


class DatasetView:
    """Either an ``n x d`` point matrix or a precomputed ``n x n`` distance matrix.

    Arrays are copied, validated and made read-only on construction.
    Use :meth:`from_points` / :meth:`from_distances` rather than the
    constructor directly.
    """

    def __init__(self, mode, data):
        if mode not in ("points", "precomputed"):
            raise ValueError(f"unknown dataset mode {mode!r}")
        data = np.array(data, dtype=np.float64, copy=True)
        if data.ndim != 2:
            raise ValueError("dataset must be a 2-D array")
        if data.shape[0] < 1:
            raise ValueError("empty dataset")
        if not np.all(np.isfinite(data)):
            raise ValueError("dataset contains NaN or infinite values")
        if mode == "precomputed":
            if data.shape[0] != data.shape[1]:
                raise ValueError(f"distance matrix must be square, got {data.shape}")
            if np.any(data < 0):
                raise ValueError("distance matrix has negative entries")
            if not np.array_equal(data, data.T):
                raise ValueError("distance matrix is not symmetric")
            if np.any(np.diag(data) != 0):
                raise ValueError("distance matrix diagonal must be zero")
        elif data.shape[1] < 1:
            raise ValueError("points must have at least one column")
        data.setflags(write=False)
        self.mode = mode
        self._data = data

    @classmethod
    def from_points(cls, points):
        return cls("points", points)

    @classmethod
    def from_distances(cls, distances):
        return cls("precomputed", distances)

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def d(self):
        return self._data.shape[1] if self.mode == "points" else None

    @property
    def points(self):
        if self.mode != "points":
            raise ValueError("precomputed view has no point coordinates")
        return self._data

    @property
    def distances(self):
        if self.mode != "precomputed":
            raise ValueError("points view has no stored distance matrix")
        return self._data

    @property
    def data(self):
        """Raw array handed to the distance kernels."""
        return self._data

    def __len__(self):
        return self.n

    def __repr__(self):
        shape = "x".join(map(str, self._data.shape))
        return f"DatasetView(mode={self.mode!r}, shape={shape})"


def check_metric(view: DatasetView, metric: Metric):
    if (view.mode == "precomputed") != (metric.kind == "precomputed"):
        raise ValueError(
            f"metric {metric.kind!r} is incompatible with a {view.mode!r} dataset view"
        )
    if metric.kind == "cosine":
        norms = np.sqrt(np.einsum("ij,ij->i", view.points, view.points))
        if np.any(norms == 0):
            raise ValueError("cosine distance is undefined for zero-norm vectors")


@numba.njit(cache=True, fastmath=False)
def pair_distance(data, i, j, kind):
    # Single source of truth for every distance the package computes.
    if kind == PRECOMPUTED:
        return data[i, j]
    if i == j:
        return 0.0
    d = data.shape[1]
    if kind == EUCLIDEAN:
        acc = 0.0
        for t in range(d):
            diff = data[i, t] - data[j, t]
            acc += diff * diff
        return np.sqrt(acc)
    dot = 0.0
    na = 0.0
    nb = 0.0
    for t in range(d):
        dot += data[i, t] * data[j, t]
        na += data[i, t] * data[i, t]
        nb += data[j, t] * data[j, t]
    out = 1.0 - dot / (np.sqrt(na) * np.sqrt(nb))
    # Rounding can push near-identical vectors slightly negative.
    return out if out > 0.0 else 0.0


@numba.njit(cache=True)
def _row_distances(data, i, kind, out):
    for j in range(data.shape[0]):
        out[j] = pair_distance(data, i, j, kind) if j != i else 0.0


@numba.njit(cache=True, parallel=True)
def _density_kernel(data, kind, radius):
    n = data.shape[0]
    rho = np.zeros(n, dtype=np.int64)
    for i in numba.prange(n):
        c = 0
        for j in range(n):
            if j != i and pair_distance(data, i, j, kind) <= radius:
                c += 1
        rho[i] = c
    return rho


def distance(view: DatasetView, metric: Metric, i: int, j: int) -> float:
    """Distance between samples ``i`` and ``j``."""
    check_metric(view, metric)
    n = view.n
    for idx in (i, j):
        if not 0 <= idx < n:
            raise IndexError(f"sample index {idx} out of range for n={n}")
    if i == j:
        return 0.0
    return float(pair_distance(view.data, int(i), int(j), metric.code))


def row_distances(view: DatasetView, metric: Metric, i: int) -> np.ndarray:
    """Distances from sample ``i`` to every sample (self included, as 0)."""
    out = np.empty(view.n)
    _row_distances(view.data, int(i), metric.code, out)
    return out


def static_density(view: DatasetView, metric: Metric, r: float) -> np.ndarray:
    """Number of other samples within distance ``r`` of each sample.

    The sample itself is not counted and the comparison is inclusive
    (``d <= r``), so coincident points count as neighbors.
    """
    if not r >= 0:
        raise ValueError(f"radius must be non-negative, got {r}")
    check_metric(view, metric)
    return _density_kernel(view.data, metric.code, float(r))
