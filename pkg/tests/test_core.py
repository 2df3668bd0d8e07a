import math

import numpy as np
import pytest

from boundary_erosion import DatasetView, Metric, configure_threads, distance, static_density
from boundary_erosion.core import row_distances

import oracles


def test_distance_unit_pair():
    v = DatasetView.from_points([[0, 0], [1, 0]])
    assert distance(v, Metric(), 0, 1) == 1.0


def test_distance_identity():
    v = DatasetView.from_points(oracles.TOY5)
    for i in range(5):
        assert distance(v, Metric(), i, i) == 0.0


def test_distance_hand_value():
    v = DatasetView.from_points([[0, 0], [0.5, 0.8]])
    assert distance(v, Metric(), 0, 1) == pytest.approx(math.sqrt(0.89), abs=1e-12)
    assert distance(v, Metric(), 0, 1) == pytest.approx(0.94340, abs=5e-6)


def test_distance_precomputed_returns_entry():
    v = DatasetView.from_distances([[0, 3], [3, 0]])
    assert distance(v, Metric("precomputed"), 0, 1) == 3.0


def test_cosine_distance():
    v = DatasetView.from_points([[1, 0], [0, 2], [3, 0], [-1, 0]])
    m = Metric("cosine")
    assert distance(v, m, 0, 1) == pytest.approx(1.0)
    assert distance(v, m, 0, 2) == pytest.approx(0.0, abs=1e-15)
    assert distance(v, m, 0, 3) == pytest.approx(2.0)


def test_cosine_rejects_zero_vector():
    v = DatasetView.from_points([[0, 0], [1, 1]])
    with pytest.raises(ValueError, match="zero-norm"):
        static_density(v, Metric("cosine"), 0.5)


def test_distance_errors():
    v = DatasetView.from_points(oracles.TOY5)
    with pytest.raises(IndexError):
        distance(v, Metric(), 0, 5)
    with pytest.raises(IndexError):
        distance(v, Metric(), -1, 0)
    with pytest.raises(ValueError, match="incompatible"):
        distance(v, Metric("precomputed"), 0, 1)
    with pytest.raises(ValueError, match="unknown metric"):
        Metric("manhattan")


def test_view_validation():
    with pytest.raises(ValueError, match="empty"):
        DatasetView.from_points(np.empty((0, 2)))
    with pytest.raises(ValueError, match="NaN"):
        DatasetView.from_points([[0, np.nan]])
    with pytest.raises(ValueError, match="square"):
        DatasetView.from_distances(np.zeros((2, 3)))
    with pytest.raises(ValueError, match="symmetric"):
        DatasetView.from_distances([[0, 1], [2, 0]])
    with pytest.raises(ValueError, match="diagonal"):
        DatasetView.from_distances([[1, 1], [1, 0]])
    with pytest.raises(ValueError, match="negative"):
        DatasetView.from_distances([[0, -1], [-1, 0]])


def test_view_is_read_only():
    src = np.array(oracles.TOY5)
    v = DatasetView.from_points(src)
    src[0, 0] = 99.0
    assert v.points[0, 0] == 0.0
    with pytest.raises(ValueError):
        v.points[0, 0] = 1.0
    assert v.n == 5 and v.d == 2 and len(v) == 5


def test_static_density_toy5():
    v = DatasetView.from_points(oracles.TOY5)
    assert static_density(v, Metric(), 1.5).tolist() == [2, 2, 2, 1, 1]
    assert static_density(v, Metric(), 100).tolist() == [4] * 5
    assert static_density(v, Metric(), 0).tolist() == [0] * 5


def test_static_density_counts_duplicates():
    v = DatasetView.from_points([[1, 1], [1, 1], [3, 3]])
    assert static_density(v, Metric(), 0).tolist() == [1, 1, 0]


def test_static_density_inclusive_boundary():
    v = DatasetView.from_points([[0.0], [0.25]])
    assert static_density(v, Metric(), 0.25).tolist() == [1, 1]


def test_static_density_negative_radius():
    v = DatasetView.from_points(oracles.TOY5)
    with pytest.raises(ValueError):
        static_density(v, Metric(), -0.1)


def test_static_density_matches_oracle_random():
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 10, (400, 3))
    d = oracles.pairwise(pts)
    v = DatasetView.from_points(pts)
    for r in (0.5, 1.7, 4.0):
        assert np.array_equal(static_density(v, Metric(), r), oracles.density(d, r))


def test_row_distances_matches_math_dist():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(50, 7))
    v = DatasetView.from_points(pts)
    row = row_distances(v, Metric(), 4)
    assert np.allclose(row, [math.dist(pts[4], p) for p in pts], rtol=1e-14, atol=0)


def test_configure_threads(monkeypatch):
    monkeypatch.setenv("ERODE_THREADS", "1")
    assert configure_threads() == 1
    with pytest.raises(ValueError):
        configure_threads("-2")
    with pytest.raises(ValueError):
        configure_threads("many")
