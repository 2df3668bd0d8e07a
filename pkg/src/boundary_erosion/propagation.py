"""Cluster reconstruction by label propagation from boundary-level peaks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .erosion import BoundaryLevels
from .graph import RnnGraph

OUTLIER = 0


@dataclass
class Labeling:
    """Cluster ids per sample (``0`` marks an outlier) and each cluster's founder.

    ``seeds[c - 1]`` is the sample that opened cluster ``c``.
    """

    label: np.ndarray
    seeds: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.label.size

    @property
    def cluster_count(self) -> int:
        return self.seeds.size

    def sizes(self) -> np.ndarray:
        """Member count of clusters ``1..cluster_count``."""
        return np.bincount(self.label, minlength=self.cluster_count + 1)[1:]


def visit_order(levels: BoundaryLevels) -> np.ndarray:
    """Samples by descending level, ascending id within a level."""
    ids = np.arange(levels.n)
    return np.lexsort((ids, -levels.level))


@numba.njit(cache=True)
def _propagate(order, indptr, indices):
    n = order.size
    label = np.zeros(n, dtype=np.int64)
    seeds = np.empty(n, dtype=np.int64)
    count = 0
    for i in order:
        for p in range(indptr[i], indptr[i + 1]):
            lj = label[indices[p]]
            if lj > 0:
                label[i] = lj
                break
        if label[i] == 0:
            seeds[count] = i
            count += 1
            label[i] = count
    return label, seeds[:count]


def propagate(levels: BoundaryLevels, g: RnnGraph) -> Labeling:
    """Copy the label of the closest already-labeled neighbor, or open a new cluster.

    Samples are visited from the highest boundary level down. Because every
    neighbor list is sorted by distance, the first labeled entry is the
    closest labeled neighbor.
    """
    if levels.n != g.n:
        raise ValueError(f"levels cover {levels.n} samples but the graph has {g.n}")
    label, seeds = _propagate(visit_order(levels), g.indptr, g.indices)
    return Labeling(label, seeds)


def propagate_augmented(levels: BoundaryLevels, g_aug: RnnGraph) -> Labeling:
    """Propagation over a graph whose short lists were topped up to ``k`` entries.

    Same rule as :func:`propagate`; ``g_aug`` normally comes from
    :func:`boundary_erosion.graph.augment_rnn`.
    """
    return propagate(levels, g_aug)


def mark_outliers(labeling: Labeling, min_cluster_size: int) -> Labeling:
    """Relabel members of clusters smaller than ``min_cluster_size`` as outliers (0).

    Surviving clusters are renumbered ``1..k`` keeping their relative order.
    """
    if min_cluster_size < 0:
        raise ValueError("min_cluster_size must be non-negative")
    sizes = labeling.sizes()
    keep = sizes >= min_cluster_size
    if keep.all():
        return Labeling(labeling.label.copy(), labeling.seeds.copy())
    remap = np.zeros(labeling.cluster_count + 1, dtype=np.int64)
    remap[1:][keep] = np.arange(1, keep.sum() + 1)
    return Labeling(remap[labeling.label], labeling.seeds[keep])
