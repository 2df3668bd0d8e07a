"""Benchmark shape datasets: download locations, expected sizes, local loading.

The files are not redistributed with the package. Fetch them once with::

    python -m boundary_erosion.datasets --dest data/

and point ``ERODE_DATA_DIR`` at that directory (``./data`` is the default).
Downloads are checked against the known sample and class counts, since
upstream does not publish checksums.
"""

from __future__ import annotations

import argparse
import os
import sys
import urllib.request
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .io import load_points_csv, read_ground_truth

SIPU = "http://cs.joensuu.fi/sipu/datasets/"


@dataclass(frozen=True)
class Benchmark:
    name: str
    points_file: str
    n: int
    n_classes: int
    radius: float
    radius_range: tuple
    labels_file: str | None = None

    @property
    def urls(self):
        files = [self.points_file] + ([self.labels_file] if self.labels_file else [])
        return {f: SIPU + f for f in files}


# Radii sit inside the ranges over which the augmented-propagation result is stable.
BENCHMARKS = {
    b.name: b
    for b in [
        Benchmark("aggregation", "Aggregation.txt", 788, 7, 2.0, (1.4, 2.4)),
        Benchmark("s3", "s3.txt", 5000, 15, 3.7e4, (2.6e4, 4.8e4), "s3-label.pa"),
        Benchmark("flame", "flame.txt", 240, 2, 1.8, (1.0, 2.7)),
        Benchmark("spiral", "spiral.txt", 312, 3, 2.7, (1.3, 4.1)),
        Benchmark("pathbased", "pathbased.txt", 300, 3, 3.8, (3.8, 3.8)),
        Benchmark("jain", "jain.txt", 373, 2, 2.3, (2.1, 2.5)),
    ]
}


def data_dir(path=None) -> Path:
    return Path(path or os.environ.get("ERODE_DATA_DIR", "data"))


def available(name, path=None) -> bool:
    b = BENCHMARKS[name]
    return all((data_dir(path) / f).is_file() for f in b.urls)


def load(name, path=None):
    """Return ``(view, truth)`` for a fetched benchmark."""
    b = BENCHMARKS[name]
    root = data_dir(path)
    missing = [f for f in b.urls if not (root / f).is_file()]
    if missing:
        raise FileNotFoundError(
            f"{name}: missing {', '.join(missing)} in {root}; run "
            f"'python -m boundary_erosion.datasets --dest {root}'"
        )
    if b.labels_file:
        view, _ = load_points_csv(root / b.points_file, labels=False)
        truth = read_ground_truth(root / b.labels_file)
        # Partition files may be 1-based or 0-based; only equality matters.
    else:
        view, truth = load_points_csv(root / b.points_file, labels=True)
    if view.n != b.n or truth.size != b.n:
        raise ValueError(f"{name}: expected {b.n} samples, found {view.n} points / {truth.size} labels")
    n_classes = np.unique(truth[truth >= 0]).size
    if n_classes != b.n_classes:
        raise ValueError(f"{name}: expected {b.n_classes} classes, found {n_classes}")
    return view, truth


def fetch(name, dest=None, overwrite=False):
    root = data_dir(dest)
    root.mkdir(parents=True, exist_ok=True)
    for fname, url in BENCHMARKS[name].urls.items():
        target = root / fname
        if target.exists() and not overwrite:
            continue
        with urllib.request.urlopen(url, timeout=60) as resp:
            target.write_bytes(resp.read())
    load(name, root)
    return root


def main(argv=None):
    parser = argparse.ArgumentParser(description="Download the 2-D shape benchmarks.")
    parser.add_argument("names", nargs="*", help=f"subset of {', '.join(sorted(BENCHMARKS))}")
    parser.add_argument("--dest", default=None, help="target directory (default: $ERODE_DATA_DIR or ./data)")
    parser.add_argument("--overwrite", action="store_true")
    args = parser.parse_args(argv)
    unknown = set(args.names) - set(BENCHMARKS)
    if unknown:
        parser.error(f"unknown dataset(s): {', '.join(sorted(unknown))}")
    status = 0
    for name in args.names or sorted(BENCHMARKS):
        try:
            fetch(name, args.dest, args.overwrite)
            print(f"{name}: ok", file=sys.stderr)
        except (OSError, ValueError) as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
