"""
Scoring a partition
===================

Accuracy matches predicted clusters to classes one to one. Pairwise F1
looks at which pairs of samples are grouped together. Label 0 marks
outliers; each one counts as a cluster of its own.
"""

import numpy as np

from boundary_erosion import clustering_accuracy, error_rate, pairwise_f1

truth = np.array([1, 1, 1, 2, 2, 2, 3, 3])
cases = {
    "perfect, renamed": np.array([7, 7, 7, 4, 4, 4, 9, 9]),
    "merged 2 and 3":   np.array([1, 1, 1, 2, 2, 2, 2, 2]),
    "split class 1":    np.array([1, 1, 5, 2, 2, 2, 3, 3]),
    "two outliers":     np.array([1, 1, 1, 2, 2, 0, 3, 0]),
}
for name, pred in cases.items():
    print(f"{name:18s} acc={clustering_accuracy(pred, truth):.3f} "
          f"err={error_rate(pred, truth):.3f} f1={pairwise_f1(pred, truth):.3f}")
