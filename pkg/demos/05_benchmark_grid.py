#!/usr/bin/env python3
"""A small cross-product experiment grid through the library API.

Every row re-derives its objective value from the emitted selection; the
oracle column is filled whenever the instance is small enough to enumerate.
Equivalent to: fairksel bench --families ... --algorithms ... --seeds ...
"""

from fairksel.cli import _bench_instance, solve_instance

FAMILIES = ["gap2", "rb-d2", "rb-d3", "rb-w3", "laminar"]
ALGORITHMS = ["oracle", "delta2", "laminar", "pipage", "lll"]
SEEDS = [0, 1, 2]

print(f"{'family':>8} {'alg':>8} {'seed':>4} {'value':>8} {'oracle':>8} "
      f"{'ratio':>6} {'feas':>5}")
for family in FAMILIES:
    for alg in ALGORITHMS:
        for seed in SEEDS:
            try:
                inst, sets = _bench_instance(family, seed)
                rep = solve_instance(inst, sets, alg, seed)
            except Exception as exc:  # mismatched family/alg combos
                print(f"{family:>8} {alg:>8} {seed:>4}  -- {exc}")
                continue
            ratio = f"{rep.ratio:.2f}" if rep.ratio is not None else "-"
            oracle = f"{rep.oracle:.3f}" if rep.oracle is not None else "-"
            print(f"{family:>8} {rep.algorithm:>8} {seed:>4} {rep.value:>8.3f} "
                  f"{oracle:>8} {ratio:>6} {str(rep.feasible):>5}")
