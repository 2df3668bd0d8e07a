"""
Approximate neighbor graphs for larger data
===========================================

Building the exact r-NN graph costs O(n^2) distance evaluations. NN-Descent
gives an approximate k-NN graph much faster; pruning it at r feeds the same
erosion and propagation steps.
"""

import time

import numpy as np

from boundary_erosion import (
    DatasetView, Metric, NnDescentParams, build_exact_knn, build_nndescent_knn,
    cluster, clustering_accuracy, graph_recall,
)

rng = np.random.default_rng(0)
centers = rng.uniform(-30, 30, (8, 10))
truth = np.repeat(np.arange(8), 500)
pts = centers[truth] + rng.normal(0, 1, (truth.size, 10))
view = DatasetView.from_points(pts)

t = time.perf_counter()
knn = build_nndescent_knn(view, Metric(), k=10, seed=0)
print(f"nn-descent {time.perf_counter() - t:.2f}s")
t = time.perf_counter()
exact = build_exact_knn(view, Metric(), 10)
print(f"brute force {time.perf_counter() - t:.2f}s  recall {graph_recall(knn, exact):.3f}")

# A radius near the typical 10th-neighbor distance keeps most lists full.
r = float(np.median(exact.distances[:, -1]))
params = NnDescentParams(k=10, seed=0)
approx, _ = cluster(view, r=r, mode="nndescent", augment_k=5, nndescent=params)
ref, _ = cluster(view, r=r, augment_k=5)
print(f"r={r:.3f} clusters exact={ref.cluster_count} approx={approx.cluster_count}")
print(f"agreement {clustering_accuracy(approx.label, ref.label):.4f}  "
      f"accuracy vs truth {clustering_accuracy(approx.label, truth):.4f}")
