"""
Absorbing stragglers with augmented propagation
===============================================

Points far from every other point within r end up as singleton clusters.
Replacing their short neighbor lists with their k nearest neighbors lets
them join the closest cluster instead.
"""

import numpy as np

from boundary_erosion import DatasetView, cluster, clustering_accuracy

rng = np.random.default_rng(1)
blobs = [rng.normal(c, 0.3, (60, 2)) for c in ([0, 0], [4, 0], [2, 3])]
stragglers = np.array([[1.9, -1.5], [5.6, 1.2], [-1.4, 1.6]])
pts = np.vstack(blobs + [stragglers])
truth = np.r_[np.repeat([1, 2, 3], 60), [1, 2, 1]]
view = DatasetView.from_points(pts)

plain, _ = cluster(view, r=0.5)
print("plain     clusters:", plain.cluster_count, "sizes:", np.sort(plain.sizes())[::-1])

aug, levels = cluster(view, r=0.5, augment_k=5)
print("augmented clusters:", aug.cluster_count, "sizes:", np.sort(aug.sizes())[::-1])
print("accuracy          :", clustering_accuracy(aug.label, truth))

# Tiny clusters can instead be flagged as outliers (label 0).
flagged, _ = cluster(view, r=0.5, min_cluster_size=5)
print("outliers flagged  :", np.flatnonzero(flagged.label == 0))
