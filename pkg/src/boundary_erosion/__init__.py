"""Density-based clustering by boundary erosion.

Samples are removed in order of their dynamic boundary density (the number
of still-present neighbors within a radius ``r``), which yields a boundary
level per sample. Clusters are then grown from the highest levels downward
by label propagation over the radius neighbor graph.

>>> import numpy as np
>>> from boundary_erosion import DatasetView, cluster
>>> pts = np.array([[0, 0], [1, 0], [0.5, 0.8], [5, 5], [5.5, 5]])
>>> labeling, levels = cluster(DatasetView.from_points(pts), "euclidean", r=1.5)
>>> labeling.label.tolist(), levels.level.tolist()
([1, 1, 1, 2, 2], [2, 2, 2, 1, 1])
"""

from .core import DatasetView, Metric, configure_threads, distance, static_density
from .erosion import BoundaryLevels, erode, rho_star_trace
from .evaluation import clustering_accuracy, error_rate, pairwise_f1
from .graph import (
    KnnGraph,
    NeighborEntry,
    ReverseGraph,
    RnnGraph,
    augment_rnn,
    build_exact_knn,
    build_exact_rnn,
    build_reverse,
    graph_recall,
    prune_knn_to_rnn,
    read_graph,
    write_graph,
)
from .io import (
    emit_svg_scatter,
    load_distance_matrix_csv,
    load_points_csv,
    read_ground_truth,
    read_result_csv,
    write_result_csv,
)
from .nndescent import NnDescentParams, build_nndescent_knn
from .pipeline import BoundaryErosion, ClusterResult, cluster
from .propagation import Labeling, mark_outliers, propagate, propagate_augmented

__version__ = "0.1.0"
