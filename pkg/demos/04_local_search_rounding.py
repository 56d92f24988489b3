#!/usr/bin/env python3
"""Bad-event resampling: the bounded-degree rounding, phase by phase.

Small maximum degrees saturate every boosted probability, so the fixed-choice
phase already covers the demand.  The interesting regime needs a large
maximum degree and small fractional values; this script builds both, shows
the event system (agent overload events, group shortfall events, and their
dependency graph), and runs the resampling loop.
"""

import math

import numpy as np

import fairksel as fk
from fairksel.lp import FractionalSolution
from fairksel.rounding import selection_probability

print("=" * 70)
print("1. The event system on a tiny residual (8-cycle, max degree 2)")
print("=" * 70)

inst = fk.make_instance([[0, 1], [1, 2], [0, 3], [2, 3]], 4, 2)
x = FractionalSolution(x=(0.25, 0.25, 0.25, 0.25), t_star=1.0)
system = fk.build_bad_events(inst, x, t_star=1.0, delta=2, allow_saturated=True)
print(f"agents -> overload events: {[e.agent for e in system.performance_events]}")
print(f"index groups of size 2 -> shortfall events: {system.groups}")
adj = fk.dependency_adjacency(system)
names = [f"A{e.agent}" for e in system.performance_events] + \
        [f"B{e.group}" for e in system.feasibility_events]
for i, nbrs in enumerate(adj):
    print(f"  {names[i]} touches {[names[j] for j in nbrs]}")
print(f"dependency degree d = {system.dependency_degree} (bound: degree^2 = 4)")

print()
print("=" * 70)
print("2. Small degrees saturate the boost: fixed choice already suffices")
print("=" * 70)

for delta in (2, 3, 4, 10, 34, 35, 40):
    p = selection_probability(0.0, delta)
    note = "saturated" if p >= 1 else f"{p:.3f}"
    print(f"  max degree {delta:>3}: boosted probability of an x=0 candidate "
          f"= {note}")
print("below degree 35 every candidate is fixed outright;"
      " the resampling phase only engages on high-degree instances")

print()
print("=" * 70)
print("3. A genuine two-phase run (degree 40, 800 candidates)")
print("=" * 70)

n, m, delta, k = 300, 800, 40, 2
rng = np.random.Generator(np.random.PCG64(15))
adj_rows = [sorted(set(int(v) for v in rng.choice(m, size=delta, replace=False)))
            for _ in range(n)]
big = fk.make_instance(adj_rows, m, k)
x = FractionalSolution(x=(k / m,) * m, t_star=1.0)
p = selection_probability(k / m, delta)
print(f"boosted probability per candidate: {p:.4f} (< 1, so nothing is fixed)")
sel = fk.lll_rounding(big, x, fk.make_rng(3))
bound = 12 * math.log(2 * math.e * delta ** 2) * (1 + 2)
print(f"selected {len(sel.chosen)} >= k = {k} candidates, "
      f"max disagreement {sel.value}")
print(f"guarantee at T* = 1: value <= 12 ln(2e degree^2)(T* + 2) = {bound:.1f} "
      f"per-agent events; observed {sel.value}")

print()
print("=" * 70)
print("4. Weighted pipeline: halve, cut, normalize, round, scale back")
print("=" * 70)

winst = fk.gen_random_bipartite(8, 12, 4, 5, weight_range=(0.5, 3.0), seed=6)
res = fk.doubling(winst)
norm, nx = fk.normalize(winst, res.t_star, res.x)
sel = fk.lll_rounding(norm.instance, nx, fk.make_rng(0), weighted=True)
chosen = norm.map_back(sel.chosen)
value = fk.max_disagreement(winst, chosen)
opt = fk.brute_force_opt(winst).value
print(f"T* = {res.t_star:.3f}; selected {len(chosen)} candidates; "
      f"value {value:.3f} vs optimum {opt:.3f}")
