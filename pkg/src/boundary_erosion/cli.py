"""Command line interface: ``cluster``, ``graph``, ``eval`` and ``plot``.

Exit status is 0 on success, 1 on runtime errors and 2 on usage errors.
Diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import evaluation
from .core import DatasetView, Metric, configure_threads
from .erosion import erode
from .graph import build_reverse, write_graph
from .io import (
    emit_svg_scatter,
    labeling_from_result,
    load_distance_matrix_csv,
    load_points_csv,
    read_ground_truth,
    read_result_csv,
    write_result_csv,
)
from .nndescent import NnDescentParams
from .pipeline import build_graphs
from .propagation import mark_outliers, propagate


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_float(text):
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return value


def _add_input(p):
    p.add_argument("--input", required=True, help="points CSV or distance-matrix CSV")
    p.add_argument("--input-kind", choices=["points", "distance-matrix"], default="points")
    p.add_argument("--metric", choices=["euclidean", "cosine", "precomputed"], default=None,
                   help="default: euclidean for points, precomputed for distance matrices")
    p.add_argument("--labels", action="store_true",
                   help="last column of a headerless points file holds class ids")
    p.add_argument("--normalize", choices=["none", "minmax", "zscore"], default="none",
                   help="rescale point coordinates per column before clustering")


def _add_graph_options(p, radius_required=True):
    p.add_argument("-r", "--radius", type=_non_negative_float, required=radius_required)
    p.add_argument("--mode", choices=["exact", "nndescent"], default="exact")
    p.add_argument("--k", type=_positive_int, default=10, help="NN-Descent neighbors per sample")
    p.add_argument("--augment-k", type=_positive_int, default=None,
                   help="top up neighbor lists shorter than this before propagation")
    p.add_argument("--seed", type=int, default=0, help="NN-Descent seed (ignored in exact mode)")


def build_parser():
    parser = argparse.ArgumentParser(prog="boundary-erosion", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a dataset and write id,label,level,rho rows")
    _add_input(p)
    _add_graph_options(p)
    p.add_argument("--min-cluster-size", type=int, default=1)
    p.add_argument("--output", default="-", help="result CSV (default: stdout)")
    p.add_argument("--gt", help="ground-truth file; metrics are reported on stderr")
    p.add_argument("--plot", help="also write an SVG scatter plot (2-D points only)")

    p = sub.add_parser("graph", help="build a neighbor graph and write it as text")
    _add_input(p)
    _add_graph_options(p)
    p.add_argument("--output", required=True)

    p = sub.add_parser("eval", help="score a result CSV against ground truth")
    p.add_argument("--input", required=True, help="result CSV written by 'cluster'")
    p.add_argument("--gt", required=True)

    p = sub.add_parser("plot", help="render clustered 2-D points as SVG")
    _add_input(p)
    p.add_argument("--result", help="result CSV; when omitted the data is clustered with -r")
    _add_graph_options(p, radius_required=False)
    p.add_argument("--min-cluster-size", type=int, default=1)
    p.add_argument("--output", "--plot", dest="output", required=True, help="SVG path")
    return parser


def _load(args):
    truth = None
    if args.input_kind == "distance-matrix":
        if args.metric not in (None, "precomputed"):
            raise ValueError("distance-matrix input requires the precomputed metric")
        if args.normalize != "none":
            raise ValueError("--normalize applies to point input only")
        return load_distance_matrix_csv(args.input), Metric("precomputed"), None
    view, truth = load_points_csv(args.input, labels=True if args.labels else None)
    metric = Metric(args.metric or "euclidean")
    if args.normalize != "none":
        pts = view.points
        if args.normalize == "minmax":
            span = np.ptp(pts, axis=0)
            pts = (pts - pts.min(axis=0)) / np.where(span > 0, span, 1.0)
        else:
            sd = pts.std(axis=0)
            pts = (pts - pts.mean(axis=0)) / np.where(sd > 0, sd, 1.0)
        view = DatasetView.from_points(pts)
    return view, metric, truth


def _run_cluster(args, view, metric):
    params = NnDescentParams(k=args.k, seed=args.seed)
    g, g_prop, _ = build_graphs(view, metric, args.radius, args.mode, args.augment_k, params)
    levels = erode(g, build_reverse(g))
    labeling = mark_outliers(propagate(levels, g_prop), args.min_cluster_size)
    return labeling, levels


def _metrics_lines(label, truth):
    return [
        f"accuracy={evaluation.clustering_accuracy(label, truth):.4f}",
        f"f1={evaluation.pairwise_f1(label, truth):.4f}",
        f"error={evaluation.error_rate(label, truth):.4f}",
        f"clusters={int(np.unique(label[label > 0]).size)}",
    ]


def _cmd_cluster(args):
    view, metric, _ = _load(args)
    labeling, levels = _run_cluster(args, view, metric)
    out = sys.stdout if args.output == "-" else args.output
    write_result_csv(labeling, levels, levels.initial_rho, out)
    print(
        f"n={view.n} clusters={labeling.cluster_count} levels={levels.max_level} "
        f"outliers={int((labeling.label == 0).sum())}",
        file=sys.stderr,
    )
    if args.gt:
        truth = read_ground_truth(args.gt)
        if truth.size != view.n:
            raise ValueError(f"ground truth has {truth.size} labels for {view.n} samples")
        for line in _metrics_lines(labeling.label, truth):
            print(line, file=sys.stderr)
    if args.plot:
        emit_svg_scatter(view, labeling, args.plot)
    return 0


def _cmd_graph(args):
    view, metric, _ = _load(args)
    params = NnDescentParams(k=args.k, seed=args.seed)
    g, g_prop, _ = build_graphs(view, metric, args.radius, args.mode, args.augment_k, params)
    write_graph(g_prop, args.output)
    print(f"n={g_prop.n} edges={g_prop.indices.size} source={g_prop.source}", file=sys.stderr)
    return 0


def _cmd_eval(args):
    table = read_result_csv(args.input)
    truth = read_ground_truth(args.gt)
    if truth.size != table.label.size:
        raise ValueError(f"ground truth has {truth.size} labels for {table.label.size} samples")
    for line in _metrics_lines(table.label, truth):
        print(line)
    return 0


def _cmd_plot(args):
    view, metric, _ = _load(args)
    if args.result:
        labeling = labeling_from_result(read_result_csv(args.result))
        if labeling.n != view.n:
            raise ValueError(f"result has {labeling.n} rows for {view.n} samples")
    elif args.radius is None:
        raise ValueError("plot needs either --result or --radius")
    else:
        labeling, _ = _run_cluster(args, view, metric)
    emit_svg_scatter(view, labeling, args.output)
    return 0


COMMANDS = {"cluster": _cmd_cluster, "graph": _cmd_graph, "eval": _cmd_eval, "plot": _cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        configure_threads()
        return COMMANDS[args.command](args)
    except (OSError, ValueError, IndexError) as exc:
        print(f"boundary-erosion {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
