import io
import re

import numpy as np
import pytest

from boundary_erosion import (
    DatasetView,
    Metric,
    cluster,
    distance,
    emit_svg_scatter,
    load_distance_matrix_csv,
    load_points_csv,
    read_ground_truth,
    read_result_csv,
    write_result_csv,
)
from boundary_erosion.io import labeling_from_result
from boundary_erosion.propagation import Labeling


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_toy5(toy5_csv, toy5):
    view, truth = load_points_csv(toy5_csv)
    assert view.n == 5 and view.d == 2 and truth is None
    assert np.array_equal(view.points, toy5)


def test_load_label_column(tmp_path):
    path = write(tmp_path, "p.csv", "x,y,label\n0,0,1\n1,0,1\n5,5,2\n")
    view, truth = load_points_csv(path)
    assert view.d == 2 and truth.tolist() == [1, 1, 2]


def test_load_headerless_labels_whitespace(tmp_path):
    path = write(tmp_path, "p.txt", "# comment\n0.5 1.5 1\n2 3 2\n\n4 4 -1\n")
    view, truth = load_points_csv(path, labels=True)
    assert view.points.tolist() == [[0.5, 1.5], [2, 3], [4, 4]]
    assert truth.tolist() == [1, 2, -1]


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "empty dataset"),
        ("# only a comment\n", "empty dataset"),
        ("1,2\n3\n", "expected 2 columns"),
        ("1,2\n3,abc\n", "non-numeric"),
        ("1,2\n3,nan\n", "non-finite"),
        ("1,2\ninf,4\n", "non-finite"),
    ],
)
def test_load_points_rejects(tmp_path, text, message):
    with pytest.raises(ValueError, match=message):
        load_points_csv(write(tmp_path, "bad.csv", text))


def test_read_ground_truth_formats(tmp_path):
    assert read_ground_truth(write(tmp_path, "a.gt", "label\n1\n2\n2\n")).tolist() == [1, 2, 2]
    assert read_ground_truth(write(tmp_path, "b.gt", "0,0,3\n1,1,4\n")).tolist() == [3, 4]
    pa = "VERSION PA 1.0\nSome header\n-----\n1\n1\n2\n"
    assert read_ground_truth(write(tmp_path, "c.pa", pa)).tolist() == [1, 1, 2]
    assert read_ground_truth(write(tmp_path, "d.gt", "1\n\n-3\nnan\n")).tolist() == [1, -1, -1]
    with pytest.raises(ValueError):
        read_ground_truth(write(tmp_path, "e.gt", "1.5\n"))


def test_distance_matrix_examples(tmp_path):
    v = load_distance_matrix_csv(write(tmp_path, "m.csv", "0,3\n3,0\n"))
    assert distance(v, Metric("precomputed"), 0, 1) == 3.0
    v = load_distance_matrix_csv(write(tmp_path, "m3.csv", "0,1.0,2\n1.0000001,0,2\n2,2,0\n"))
    assert v.distances[0, 1] == v.distances[1, 0] == pytest.approx(1.00000005)
    with pytest.raises(ValueError, match="square"):
        load_distance_matrix_csv(write(tmp_path, "ns.csv", "0,1,2\n1,0,2\n"))


def test_distance_matrix_rejects(tmp_path):
    with pytest.raises(ValueError, match="asymmetric"):
        load_distance_matrix_csv(write(tmp_path, "a.csv", "0,1\n2,0\n"))
    with pytest.raises(ValueError, match="negative"):
        load_distance_matrix_csv(write(tmp_path, "n.csv", "0,-1\n-1,0\n"))
    with pytest.raises(ValueError, match="diagonal"):
        load_distance_matrix_csv(write(tmp_path, "d.csv", "1,1\n1,0\n"))
    with pytest.raises(ValueError, match="NaN"):
        load_distance_matrix_csv(write(tmp_path, "x.csv", "0,nan\nnan,0\n"))
    with pytest.raises(ValueError, match="empty"):
        load_distance_matrix_csv(write(tmp_path, "e.csv", "\n"))


def test_distance_matrix_tiny_diagonal_zeroed(tmp_path):
    v = load_distance_matrix_csv(write(tmp_path, "t.csv", "1e-9,5\n5,0\n"))
    assert v.distances[0, 0] == 0.0


def test_result_csv_toy5(tmp_path, toy5):
    labeling, levels = cluster(DatasetView.from_points(toy5), r=1.5)
    path = tmp_path / "out.csv"
    write_result_csv(labeling, levels, levels.initial_rho, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "id,label,level,rho"
    assert lines[1] == "0,1,2,2"
    assert len(lines) == 6
    table = read_result_csv(path)
    assert table.label.tolist() == [1, 1, 1, 2, 2]
    assert table.level.tolist() == [2, 2, 2, 1, 1]
    assert table.rho.tolist() == [2, 2, 2, 1, 1]
    back = labeling_from_result(table)
    assert back.seeds.tolist() == labeling.seeds.tolist()


def test_result_csv_single_sample():
    labeling, levels = cluster(DatasetView.from_points([[1.0, 2.0]]), r=1.0)
    buf = io.StringIO()
    write_result_csv(labeling, levels, levels.initial_rho, buf)
    assert buf.getvalue() == "id,label,level,rho\n0,1,1,0\n"


def test_result_csv_outliers(tmp_path, toy5):
    labeling, levels = cluster(DatasetView.from_points(toy5), r=1.5, min_cluster_size=3)
    path = tmp_path / "out.csv"
    write_result_csv(labeling, levels, levels.initial_rho, path)
    rows = path.read_text().splitlines()[1:]
    assert [r.split(",")[1] for r in rows] == ["1", "1", "1", "0", "0"]


def test_result_csv_errors(tmp_path, toy5):
    labeling, levels = cluster(DatasetView.from_points(toy5), r=1.5)
    with pytest.raises(ValueError):
        write_result_csv(labeling, levels.level[:3], levels.initial_rho, tmp_path / "x.csv")
    with pytest.raises(OSError):
        write_result_csv(labeling, levels, levels.initial_rho, tmp_path / "missing" / "x.csv")
    bad = write(tmp_path, "bad.csv", "a,b\n")
    with pytest.raises(ValueError):
        read_result_csv(bad)


def circles(svg, cls):
    return re.findall(rf'<circle class="{cls}"[^>]*>', svg)


def test_svg_toy5(tmp_path, toy5):
    labeling, _ = cluster(DatasetView.from_points(toy5), r=1.5)
    path = tmp_path / "p.svg"
    emit_svg_scatter(DatasetView.from_points(toy5), labeling, path, title="toy")
    svg = path.read_text()
    pts = circles(svg, "point")
    assert len(pts) == 5
    fills = {re.search(r'fill="([^"]+)"', c).group(1) for c in pts}
    assert len(fills) == 2
    assert len(circles(svg, "founder")) == 2
    assert "<title>toy</title>" in svg


def test_svg_margin(tmp_path):
    pts = np.array([[0.0, 0.0], [10.0, 10.0]])
    lab = Labeling(np.array([1, 2]), np.array([0, 1]))
    path = tmp_path / "m.svg"
    emit_svg_scatter(DatasetView.from_points(pts), lab, path, size=110)
    xs = [float(x) for x in re.findall(r'class="point"[^>]*cx="([\d.]+)"', path.read_text())]
    # 5% margin on each side of a 10-unit span scaled to 110 px.
    assert xs == pytest.approx([5.0, 105.0])


def test_svg_all_outliers(tmp_path, toy5):
    lab = Labeling(np.zeros(5, dtype=np.int64), np.empty(0, dtype=np.int64))
    path = tmp_path / "o.svg"
    emit_svg_scatter(DatasetView.from_points(toy5), lab, path)
    pts = circles(path.read_text(), "point")
    assert all('fill="none"' in c and "#9e9e9e" in c for c in pts)


def test_svg_requires_2d(tmp_path):
    lab = Labeling(np.ones(2, dtype=np.int64), np.array([0]))
    with pytest.raises(ValueError, match="plot requires 2-D data"):
        emit_svg_scatter(DatasetView.from_points(np.zeros((2, 3))), lab, tmp_path / "x.svg")
