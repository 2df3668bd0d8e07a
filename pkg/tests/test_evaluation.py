import numpy as np
import pytest

from boundary_erosion import clustering_accuracy, error_rate, pairwise_f1
from boundary_erosion.evaluation import _pairs, contingency_table, pair_counts, pairwise_precision_recall

import oracles


def test_accuracy_examples():
    assert clustering_accuracy([1, 1, 2], [2, 2, 1]) == 1.0
    assert clustering_accuracy([1, 1, 1, 1], [1, 1, 2, 2]) == 0.5
    assert clustering_accuracy([3, 1, 2, 2], [3, 1, 2, 2]) == 1.0


def test_f1_examples():
    assert pairwise_f1([1, 2, 2, 3], [1, 2, 2, 3]) == 1.0
    p, r = pairwise_precision_recall([1, 1, 1, 1], [1, 1, 2, 2])
    assert (p, r) == (2 / 6, 1.0)
    assert pairwise_f1([1, 1, 1, 1], [1, 1, 2, 2]) == 0.5
    assert pairwise_f1([1, 2, 3, 4], [1, 1, 2, 3]) == 0.0


def test_f1_degenerate():
    assert pairwise_f1([1, 2, 3], [5, 6, 7]) == 1.0  # no pairs anywhere
    assert pairwise_f1([1, 1, 2], [1, 2, 3]) == 0.0
    with pytest.raises(ValueError):
        pairwise_f1([1], [1])


def test_error_rate_examples():
    assert error_rate([1, 2], [2, 1]) == 0.0
    assert error_rate([1, 1, 1, 1], [1, 1, 2, 2]) == 0.5


def test_size_mismatch():
    with pytest.raises(ValueError):
        clustering_accuracy([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        pairwise_f1([1, 2], [1])


def test_outliers_are_singletons():
    # Two outliers cannot both match one class.
    assert clustering_accuracy([0, 0, 1, 1], [1, 1, 2, 2]) == 0.75
    both, in_pred, in_truth = pair_counts([0, 0, 1, 1], [1, 1, 2, 2])
    assert (both, in_pred, in_truth) == (1, 1, 2)


def test_unscored_truth_dropped():
    assert clustering_accuracy([1, 2, 2], [1, -1, 2]) == 1.0
    table = contingency_table([1, 2, 2], [1, -1, 2])
    assert table.sum() == 2
    with pytest.raises(ValueError):
        clustering_accuracy([1, 2], [-1, -1])


def test_fragmented_labels_stay_cheap():
    # 40k singleton clusters would need a 40k x 40k dense table.
    n = 40_000
    pred = np.arange(1, n + 1)
    truth = np.arange(n) % 7
    assert clustering_accuracy(pred, truth) == 7 / n
    assert clustering_accuracy(pred, pred) == 1.0


def test_matches_bruteforce_random():
    rng = np.random.default_rng(9)
    for _ in range(200):
        n = int(rng.integers(2, 40))
        pred = rng.integers(1, 5, n)
        pred[rng.integers(0, n, 2)] = 0  # at most two outliers keeps brute force small
        truth = rng.integers(0, 5, n)
        assert clustering_accuracy(pred, truth) == pytest.approx(oracles.accuracy_bruteforce(pred, truth))
        assert pairwise_f1(pred, truth) == pytest.approx(oracles.pair_f1_enumerate(pred, truth))


def test_large_pair_counts_exact():
    # Pair counts past 2**53 would lose precision in floating point.
    big = 200_000_000
    assert _pairs(np.array([big, 3])) == big * (big - 1) // 2 + 3
