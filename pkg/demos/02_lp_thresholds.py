#!/usr/bin/env python3
"""Feasibility-LP lower bounds and the worst-case construction.

The relaxation guesses a threshold T and asks for fractional loads under T
with total mass k.  The smallest feasible T lower-bounds the true optimum:
integers are binary-searched in the unit-weight case, halved (doubling) in
the weighted case.  The k^2-candidate construction shows the bound can be
off by a factor of k.
"""

import fairksel as fk

print("=" * 70)
print("1. Unit weights: binary search the integer threshold")
print("=" * 70)

inst = fk.gen_random_bipartite(n=8, m=10, max_degree=3, k=4, seed=2)
sol = fk.guess_tstar_unweighted(inst)
opt = fk.brute_force_opt(inst).value
print(f"random instance: T* = {sol.t_star}, integral optimum = {opt}")
print(f"witness x = {[round(v, 3) for v in sol.x]}")
print(f"residuals: {fk.residuals(inst, sol.x, sol.t_star)}")

print()
print("=" * 70)
print("2. Weighted: halve from the max agent load, bar over-heavy candidates")
print("=" * 70)

winst = fk.gen_random_bipartite(n=8, m=10, max_degree=3, k=4,
                                weight_range=(0.5, 6.0), seed=2)
res = fk.doubling(winst)
wopt = fk.brute_force_opt(winst).value
print(f"T* = {res.t_star:.4f}, optimum = {wopt:.4f}  "
      f"(guarantee: T* <= 2 OPT, here ratio {res.t_star / wopt:.3f})")
norm, nx = fk.normalize(winst, res.t_star, res.x)
print(f"after normalization: T* = {nx.t_star}, weights in "
      f"[{min(norm.instance.weights):.3f}, {max(norm.instance.weights):.3f}], "
      f"{winst.n_candidates - len(norm.kept)} heavy candidates cut")

print()
print("=" * 70)
print("3. The integrality gap construction")
print("=" * 70)

for k in (2, 3):
    gap = fk.gen_gap_instance(k)
    opt = fk.brute_force_opt(gap).value
    t_star = fk.guess_tstar_unweighted(gap).t_star
    print(f"k={k}: {gap.n_candidates} candidates, {gap.n_agents} agents "
          f"(one per k-subset); OPT = {opt}, T* = {t_star}, gap = {opt / t_star:.0f}")
print()
print("Every size-k selection is watched in full by its own agent, but the")
print("LP spreads 1/k mass everywhere and keeps all fractional loads at 1.")
