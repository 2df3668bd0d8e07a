"""
Erosion and propagation on five points
======================================

Two tight groups: a triangle near the origin and a pair near (5, 5).
We follow one run of the algorithm step by step.
"""

import numpy as np

from boundary_erosion import DatasetView, Metric, build_exact_rnn, erode, propagate, rho_star_trace, static_density

pts = np.array([[0, 0], [1, 0], [0.5, 0.8], [5, 5], [5.5, 5]])
view = DatasetView.from_points(pts)
r = 1.5

# Static density: neighbors within r, the sample itself not counted.
print("rho      ", static_density(view, Metric(), r))

# The r-NN graph keeps each list sorted by distance.
g = build_exact_rnn(view, Metric(), r)
for i in range(g.n):
    ids, dists = g.neighbors(i)
    print(f"  {i}: {list(zip(ids.tolist(), np.round(dists, 3).tolist()))}")

# Erosion removes every sample sharing the current minimum rho* at once.
# The pair goes first (rho* = 1), then the triangle (rho* = 2).
for b, (ids, m) in enumerate(rho_star_trace(g), 1):
    print(f"batch {b}: ids={ids.tolist()} rho*={m}")

levels = erode(g)
print("levels   ", levels.level)

# Propagation visits high levels first. The first sample of each group
# finds no labeled neighbor and founds a cluster.
labeling = propagate(levels, g)
print("labels   ", labeling.label, "founders", labeling.seeds)
