"""End-to-end clustering: neighbor graph, erosion, propagation, outlier marking."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import DatasetView, Metric
from .erosion import BoundaryLevels, erode
from .graph import augment_rnn, build_exact_rnn, build_reverse, prune_knn_to_rnn
from .nndescent import NnDescentParams, build_nndescent_knn
from .propagation import Labeling, mark_outliers, propagate, propagate_augmented

MODES = ("exact", "nndescent")


class ClusterResult(NamedTuple):
    labeling: Labeling
    levels: BoundaryLevels


def build_graphs(view, metric, r, mode="exact", augment_k=None, nndescent=None):
    """Return ``(erosion_graph, propagation_graph, knn)``; ``knn`` is None in exact mode."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if augment_k is not None and not 1 <= augment_k < view.n:
        raise ValueError(f"augment_k must satisfy 1 <= k < n={view.n}, got {augment_k}")
    knn = None
    if mode == "exact":
        g = build_exact_rnn(view, metric, r)
    else:
        if view.mode != "points":
            raise ValueError("nndescent mode requires point input")
        params = nndescent or NnDescentParams()
        if augment_k is not None and augment_k > params.k:
            params = NnDescentParams(**{**params.__dict__, "k": augment_k})
        if params.k >= view.n:
            raise ValueError(f"graph k={params.k} must be smaller than n={view.n}")
        knn = build_nndescent_knn(view, metric, params)
        g = prune_knn_to_rnn(knn, r)
    g_prop = g if augment_k is None else augment_rnn(g, view, metric, augment_k, knn)
    return g, g_prop, knn


def cluster(
    view: DatasetView,
    metric: Metric | str = "euclidean",
    r: float = 1.0,
    mode: str = "exact",
    *,
    augment_k: int | None = None,
    min_cluster_size: int = 1,
    nndescent: NnDescentParams | None = None,
) -> ClusterResult:
    """Cluster ``view`` with neighborhood radius ``r``.

    ``augment_k`` switches propagation to the augmented graph, where lists
    shorter than ``augment_k`` are replaced by top-k neighbors. Clusters
    smaller than ``min_cluster_size`` end up labeled 0.
    """
    if isinstance(metric, str):
        metric = Metric(metric)
    g, g_prop, _ = build_graphs(view, metric, r, mode, augment_k, nndescent)
    levels = erode(g, build_reverse(g))
    if augment_k is None:
        labeling = propagate(levels, g)
    else:
        labeling = propagate_augmented(levels, g_prop)
    return ClusterResult(mark_outliers(labeling, min_cluster_size), levels)


class BoundaryErosion:
    """Estimator wrapper around :func:`cluster`.

    After :meth:`fit`, ``labels_`` holds cluster ids (0 for outliers),
    ``levels_`` the boundary levels, ``graph_`` the erosion graph and
    ``seeds_`` the founding sample of every cluster.
    """

    def __init__(self, radius=1.0, metric="euclidean", mode="exact", augment_k=None,
                 min_cluster_size=1, n_neighbors=10, seed=0):
        self.radius = radius
        self.metric = metric
        self.mode = mode
        self.augment_k = augment_k
        self.min_cluster_size = min_cluster_size
        self.n_neighbors = n_neighbors
        self.seed = seed

    def fit(self, X, y=None):
        metric = Metric(self.metric)
        if metric.kind == "precomputed":
            view = DatasetView.from_distances(X)
        else:
            view = DatasetView.from_points(X)
        params = NnDescentParams(k=self.n_neighbors, seed=self.seed)
        g, g_prop, _ = build_graphs(view, metric, self.radius, self.mode, self.augment_k, params)
        self.levels_ = erode(g)
        if self.augment_k is None:
            labeling = propagate(self.levels_, g)
        else:
            labeling = propagate_augmented(self.levels_, g_prop)
        labeling = mark_outliers(labeling, self.min_cluster_size)
        self.graph_ = g
        self.labels_ = labeling.label
        self.seeds_ = labeling.seeds
        self.n_clusters_ = labeling.cluster_count
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_

    @property
    def boundary_levels_(self) -> np.ndarray:
        return self.levels_.level
