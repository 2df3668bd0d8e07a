"""Dataset loaders, result tables and SVG scatter output."""

from __future__ import annotations

import csv
import math
from typing import NamedTuple
from xml.sax.saxutils import escape

import numpy as np

from .core import DatasetView
from .propagation import Labeling

UNSCORED = -1
RESULT_HEADER = ["id", "label", "level", "rho"]
PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]
OUTLIER_COLOR = "#9e9e9e"


def _rows(path):
    """Yield ``(line_number, cells)`` for non-blank, non-comment lines."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            cells = [c.strip() for c in text.split(",")] if "," in text else text.split()
            yield lineno, cells


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _gt_id(cell):
    if cell == "" or cell.lower() in ("nan", "na", "?", "none"):
        return UNSCORED
    value = float(cell)
    if not math.isfinite(value) or value < 0:
        return UNSCORED
    if value != int(value):
        raise ValueError(f"ground-truth id {cell!r} is not an integer")
    return int(value)


def load_points_csv(path, labels=None):
    """Read a point matrix, optionally splitting off a trailing label column.

    Comma- and whitespace-separated files are both accepted; ``#`` starts a
    comment line. A header row whose last field is ``label`` marks the last
    column as ground truth; pass ``labels=True`` for headerless files that
    carry class ids in the last column.

    Returns
    -------
    view : DatasetView
    truth : ndarray of int64 or None
        Class ids, with missing or negative ids mapped to -1 (unscored).
    """
    rows = []
    width = None
    header = None
    for lineno, cells in _rows(path):
        if header is None and not rows and not all(_is_number(c) for c in cells):
            header = [c.lower() for c in cells]
            if labels is None:
                labels = header[-1] == "label"
            continue
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ValueError(f"{path}:{lineno}: expected {width} columns, found {len(cells)}")
        rows.append((lineno, cells))
    if not rows:
        raise ValueError(f"{path}: empty dataset")
    if header is not None and len(header) != width:
        raise ValueError(f"{path}: header has {len(header)} fields but rows have {width}")
    labels = bool(labels)
    n_feat = width - 1 if labels else width
    if n_feat < 1:
        raise ValueError(f"{path}: no feature columns")

    points = np.empty((len(rows), n_feat))
    truth = np.empty(len(rows), dtype=np.int64) if labels else None
    for r, (lineno, cells) in enumerate(rows):
        for c in range(n_feat):
            try:
                value = float(cells[c])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric value {cells[c]!r}") from None
            if not math.isfinite(value):
                raise ValueError(f"{path}:{lineno}: non-finite value {cells[c]!r}")
            points[r, c] = value
        if labels:
            try:
                truth[r] = _gt_id(cells[-1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return DatasetView.from_points(points), truth


def read_ground_truth(path) -> np.ndarray:
    """Class ids from the last column of each row; a header row is skipped.

    Partition files that put a ``----`` separator line after a free-form
    header are also understood. Missing or negative ids become -1.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    sep = [i for i, line in enumerate(lines) if line.strip().startswith("----")]
    if sep:
        lines = lines[sep[0] + 1:]
    out = []
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        cell = (text.split(",") if "," in text else text.split())[-1].strip()
        if not out and not _is_number(cell) and cell.lower() in ("label", "class", "gt", "truth"):
            continue
        try:
            out.append(_gt_id(cell))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not out:
        raise ValueError(f"{path}: no ground-truth labels")
    return np.array(out, dtype=np.int64)


def load_distance_matrix_csv(path, rtol=1e-6) -> DatasetView:
    """Read a square distance matrix.

    Asymmetry up to ``rtol`` times the largest entry is averaged away and a
    diagonal that small is zeroed; anything larger is rejected.
    """
    rows = []
    for lineno, cells in _rows(path):
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-numeric entry") from None
    if not rows:
        raise ValueError(f"{path}: empty dataset")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError(f"{path}: distance matrix must be square ({n} rows)")
    m = np.array(rows)
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{path}: distance matrix contains NaN or infinite values")
    if np.any(m < 0):
        raise ValueError(f"{path}: distance matrix has negative entries")
    tol = rtol * m.max()
    asym = np.abs(m - m.T).max()
    if asym > tol:
        raise ValueError(f"{path}: distance matrix asymmetric by {asym:g} (tolerance {tol:g})")
    m = (m + m.T) / 2.0
    diag = np.abs(np.diag(m)).max()
    if diag > tol:
        raise ValueError(f"{path}: distance matrix diagonal reaches {diag:g}")
    np.fill_diagonal(m, 0.0)
    return DatasetView.from_distances(m)


class ResultTable(NamedTuple):
    label: np.ndarray
    level: np.ndarray
    rho: np.ndarray


def write_result_csv(labeling: Labeling, levels, rho, path):
    """Write ``id,label,level,rho`` rows ordered by id to a path or open text file."""
    level = levels.level if hasattr(levels, "level") else np.asarray(levels)
    rho = np.asarray(rho)
    n = labeling.n
    if level.size != n or rho.size != n:
        raise ValueError("labeling, levels and rho must have the same length")
    rows = np.column_stack([np.arange(n), labeling.label, level, rho]).astype(np.int64)
    if hasattr(path, "write"):
        _write_rows(path, rows)
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            _write_rows(fh, rows)


def _write_rows(fh, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(RESULT_HEADER)
    writer.writerows(rows.tolist())


def read_result_csv(path) -> ResultTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RESULT_HEADER:
            raise ValueError(f"{path}: expected header {','.join(RESULT_HEADER)}")
        rows = [r for r in reader if r]
    table = np.array(rows, dtype=np.int64).reshape(-1, 4)
    if not np.array_equal(table[:, 0], np.arange(len(table))):
        raise ValueError(f"{path}: ids must run 0..n-1 in order")
    return ResultTable(table[:, 1].copy(), table[:, 2].copy(), table[:, 3].copy())


def labeling_from_result(table: ResultTable) -> Labeling:
    """Rebuild a :class:`Labeling`; founders are re-derived as each cluster's
    highest-level member (ties to the lowest id)."""
    order = np.lexsort((np.arange(table.label.size), -table.level))
    count = int(table.label.max(initial=0))
    seeds = np.full(count, -1, dtype=np.int64)
    for i in order:
        c = table.label[i]
        if c > 0 and seeds[c - 1] < 0:
            seeds[c - 1] = i
    return Labeling(table.label.copy(), seeds)


def emit_svg_scatter(view: DatasetView, labeling: Labeling, path, size=600, title=None):
    """Scatter plot of 2-D points colored by cluster.

    Outliers are drawn as hollow grey circles and every cluster founder gets
    an extra ring.
    """
    if view.mode != "points" or view.d != 2:
        raise ValueError("plot requires 2-D data")
    if labeling.n != view.n:
        raise ValueError("labeling and dataset sizes differ")
    pts = view.points
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = hi - lo
    span[span == 0] = 1.0
    lo = lo - 0.05 * span
    hi = hi + 0.05 * span
    span = hi - lo
    scale = size / span.max()
    width, height = span * scale
    dot = max(1.5, min(6.0, 300.0 / math.sqrt(view.n)))

    def xy(p):
        return (p[0] - lo[0]) * scale, height - (p[1] - lo[1]) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1f}" height="{height:.1f}" '
        f'viewBox="0 0 {width:.3f} {height:.3f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    for i in range(view.n):
        x, y = xy(pts[i])
        c = int(labeling.label[i])
        if c == 0:
            style = f'fill="none" stroke="{OUTLIER_COLOR}" stroke-width="1"'
        else:
            style = f'fill="{PALETTE[(c - 1) % len(PALETTE)]}"'
        out.append(f'<circle class="point" data-id="{i}" data-label="{c}" cx="{x:.3f}" cy="{y:.3f}" r="{dot:.2f}" {style}/>')
    for c, i in enumerate(labeling.seeds, 1):
        x, y = xy(pts[i])
        out.append(
            f'<circle class="founder" data-label="{c}" cx="{x:.3f}" cy="{y:.3f}" r="{dot * 2.2:.2f}" '
            f'fill="none" stroke="black" stroke-width="1.5"/>'
        )
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
