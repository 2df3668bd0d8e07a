"""
Clustering from a distance matrix
=================================

When samples are not vectors (sequence alignments, say) only pairwise
distances are available. The matrix is read from CSV and used directly.
"""

import tempfile
from pathlib import Path

import numpy as np

from boundary_erosion import cluster, load_distance_matrix_csv, pairwise_f1

rng = np.random.default_rng(5)
truth = np.repeat(np.arange(6), 15)
emb = rng.normal(0, 20, (6, 5))[truth] + rng.normal(0, 1, (truth.size, 5))
d = np.sqrt(((emb[:, None] - emb[None]) ** 2).sum(-1))

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "distances.csv"
    np.savetxt(path, d, delimiter=",", fmt="%.10g")
    view = load_distance_matrix_csv(path)

labeling, levels = cluster(view, "precomputed", r=4.0)
print("clusters:", labeling.cluster_count, "levels used:", levels.max_level)
print("pairwise F1:", round(pairwise_f1(labeling.label, truth), 4))
