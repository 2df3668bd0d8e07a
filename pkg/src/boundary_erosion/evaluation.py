"""Clustering quality against ground truth.

Outliers (predicted label 0) count as singleton clusters. Ground-truth ids
below zero mark unscored samples, which are dropped before scoring.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .propagation import Labeling


def _labels(x):
    return np.asarray(x.label if isinstance(x, Labeling) else x)


def _prepare(pred, truth):
    pred = _labels(pred).astype(np.int64)
    truth = _labels(truth).astype(np.int64)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError(f"label vectors differ in shape: {pred.shape} vs {truth.shape}")
    scored = truth >= 0
    pred, truth = pred[scored], truth[scored]
    # Outliers become singletons with ids that cannot collide with real clusters.
    outliers = pred == 0
    pred = pred.copy()
    pred[outliers] = -1 - np.arange(outliers.sum())
    return pred, truth


def _sparse_table(pred, truth):
    pred, truth = _prepare(pred, truth)
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    shape = (p.max(initial=-1) + 1, t.max(initial=-1) + 1)
    # Duplicate (row, col) entries are summed on conversion.
    return coo_matrix((np.ones(p.size, dtype=np.int64), (p, t)), shape=shape).tocsr()


def contingency_table(pred, truth) -> np.ndarray:
    """Counts of samples per (predicted cluster, true class) pair."""
    return _sparse_table(pred, truth).toarray()


def clustering_accuracy(pred, truth) -> float:
    """Fraction of samples matched under the best one-to-one cluster/class pairing.

    Zero cells never help a matching, so the assignment is solved separately
    on each connected block of the contingency table. That keeps heavily
    fragmented labelings (thousands of clusters) cheap.
    """
    table = _sparse_table(pred, truth)
    total = int(table.sum())
    if total == 0:
        raise ValueError("no scored samples")
    n_rows, n_cols = table.shape
    coo = table.tocoo()
    bip = coo_matrix(
        (np.ones(coo.nnz), (coo.row, coo.col + n_rows)), shape=(n_rows + n_cols,) * 2
    )
    n_comp, comp = connected_components(bip, directed=False)
    row_comp = comp[:n_rows]
    col_comp = comp[n_rows:]
    rows_in = np.bincount(row_comp, minlength=n_comp)
    cols_in = np.bincount(col_comp, minlength=n_comp)
    # A block with a single row or column simply contributes its largest cell.
    entry_comp = row_comp[coo.row]
    best = np.zeros(n_comp, dtype=np.int64)
    np.maximum.at(best, entry_comp, coo.data)
    simple = (rows_in <= 1) | (cols_in <= 1)
    matched = int(best[simple].sum())
    for c in np.flatnonzero(~simple):
        rows = np.flatnonzero(row_comp == c)
        cols = np.flatnonzero(col_comp == c)
        block = table[rows][:, cols].toarray()
        r, k = linear_sum_assignment(block, maximize=True)
        matched += int(block[r, k].sum())
    return matched / total


def _pairs(counts) -> int:
    return sum(int(c) * (int(c) - 1) // 2 for c in np.asarray(counts).ravel())


def pair_counts(pred, truth):
    """``(together_in_both, together_in_pred, together_in_truth)`` over unordered pairs."""
    table = _sparse_table(pred, truth)
    return _pairs(table.data), _pairs(table.sum(axis=1)), _pairs(table.sum(axis=0))


def pairwise_precision_recall(pred, truth):
    both, in_pred, in_truth = pair_counts(pred, truth)
    precision = both / in_pred if in_pred else (1.0 if not in_truth else 0.0)
    recall = both / in_truth if in_truth else (1.0 if not in_pred else 0.0)
    return precision, recall


def pairwise_f1(pred, truth) -> float:
    """Harmonic mean of pair-level precision and recall."""
    if _prepare(pred, truth)[0].size < 2:
        raise ValueError("pairwise F1 needs at least two scored samples")
    both, in_pred, in_truth = pair_counts(pred, truth)
    if in_pred == 0 and in_truth == 0:
        return 1.0
    if in_pred == 0 or in_truth == 0 or both == 0:
        return 0.0
    # 2PR/(P+R) with P = both/in_pred and R = both/in_truth, kept in integers.
    return 2 * both / (in_pred + in_truth)


def error_rate(pred, truth) -> float:
    return 1.0 - clustering_accuracy(pred, truth)
