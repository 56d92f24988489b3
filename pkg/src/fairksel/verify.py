"""Desk-scale verification: every testable guarantee against the oracle.

Each check generates seeded instances, runs the relevant pipeline, and
compares against ``brute_force_opt`` or a stated bound.  The CLI ``verify``
subcommand and the acceptance test suite both drive these functions.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import (
    Instance,
    degree_profile,
    instance_from_sets,
    max_disagreement,
    preprocess,
)
from .exact import (
    brute_force_opt,
    solve_delta2_unweighted,
    solve_delta2_weighted,
    solve_laminar,
)
from .gen import (
    gen_gap_instance,
    gen_incidence,
    gen_path_cycle,
    gen_random_bipartite,
    gen_random_laminar,
)
from .lp import FractionalSolution, doubling, guess_tstar_unweighted, normalize, residuals
from .rounding import (
    ResampleBudgetError,
    lll_rounding,
    make_rng,
    run_trials,
)


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    rows: list[dict] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.detail}"


def _close(a, b, rel: float = 1e-9) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def _with_demand(inst: Instance, k: int) -> Instance:
    return dataclasses.replace(inst, demand=k)


# ---------------------------------------------------------------------------
# Criterion 1: exact solvers match the oracle on every small instance
# ---------------------------------------------------------------------------

def _random_delta2(rng: np.random.Generator, max_m: int,
                   weighted: bool, integer: bool) -> Instance:
    if rng.random() < 0.6:
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, min(max_m, 2 * n) + 1))
        wr = None
        if weighted:
            wr = (0, 9) if integer else (0.1, 5.0)
        return gen_random_bipartite(
            n, m, max_degree=2, k=1, weight_range=wr,
            seed=int(rng.integers(0, 2**31)), integer_weights=integer,
        )
    comps = []
    total = 0
    while total < max_m:
        kind = "path" if rng.random() < 0.5 else "cycle"
        lo = 1 if kind == "path" else 2
        ell = int(rng.integers(lo, 5))
        if total + ell > max_m:
            break
        comps.append((kind, ell))
        total += ell
    if not comps:
        comps = [("path", 1)]
        total = 1
    wr = None
    if weighted:
        wr = (0, 9) if integer else (0.1, 5.0)
    return gen_path_cycle(comps, k=1, weight_range=wr,
                          seed=int(rng.integers(0, 2**31)), integer_weights=integer)


def crit1_exact_vs_oracle(instances_per_class: int = 500, max_m: int = 12,
                          seed: int = 1000, budget_s: float = 120.0) -> CheckResult:
    """Delta<=2 (unit and weighted) and laminar solvers equal the oracle for
    every valid demand; zero tolerance on integer weights, 1e-9 rel on floats."""
    t0 = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(seed))
    rows: list[dict] = []
    mismatches = 0
    checks = 0

    def record(cls: str, m: int, k: int, got, want, exact: bool) -> None:
        nonlocal mismatches, checks
        checks += 1
        ok = (got == want) if exact else _close(got, want)
        if not ok:
            mismatches += 1
        rows.append({"class": cls, "m": m, "k": k, "value": got, "oracle": want,
                     "ok": ok})

    for i in range(instances_per_class):
        inst = _random_delta2(rng, max_m, weighted=False, integer=True)
        for k in range(1, inst.n_candidates + 1):
            ik = _with_demand(inst, k)
            got = solve_delta2_unweighted(ik).value
            want = brute_force_opt(ik).value
            record("delta2-unweighted", inst.n_candidates, k, got, want, exact=True)

    for i in range(instances_per_class):
        integer = i % 5 != 4  # every fifth instance gets float weights
        inst = _random_delta2(rng, max_m, weighted=True, integer=integer)
        for k in range(1, inst.n_candidates + 1):
            ik = _with_demand(inst, k)
            got = solve_delta2_weighted(ik).value
            want = brute_force_opt(ik).value
            record("delta2-weighted", inst.n_candidates, k, got, want, exact=integer)

    for i in range(instances_per_class):
        integer = i % 5 != 4
        n_el = int(rng.integers(1, 9))
        n_sets = int(rng.integers(1, min(max_m, 2 * n_el - 1) + 1))
        wr = (0, 9) if integer else (0.1, 5.0)
        sets, weights = gen_random_laminar(
            n_el, n_sets, weight_range=wr,
            seed=int(rng.integers(0, 2**31)), integer_weights=integer,
        )
        base = instance_from_sets(n_el, sets, 1, weights)
        for k in range(1, n_sets + 1):
            ik = _with_demand(base, k)
            got = solve_laminar(ik, sets).value
            want = brute_force_opt(ik).value
            record("laminar", n_sets, k, got, want, exact=integer)

    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < budget_s
    detail = (
        f"{checks} solver-vs-oracle comparisons over 3x{instances_per_class} "
        f"instances, {mismatches} mismatches, {elapsed:.1f}s"
    )
    return CheckResult("exact-vs-oracle", ok, detail, rows, elapsed)


# ---------------------------------------------------------------------------
# Criterion 2: integrality-gap construction measures gap exactly k
# ---------------------------------------------------------------------------

def crit2_gap(budget_s: float = 10.0) -> CheckResult:
    t0 = time.perf_counter()
    rows = []
    ok = True
    for k in (2, 3):
        inst = gen_gap_instance(k)
        opt = brute_force_opt(inst).value
        sol = guess_tstar_unweighted(inst)
        gap = opt / sol.t_star
        rows.append({"k": k, "opt": opt, "t_star": sol.t_star, "gap": gap})
        if opt != k or sol.t_star != 1.0:
            ok = False
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < budget_s
    detail = "; ".join(
        f"k={r['k']}: OPT={r['opt']}, T*={r['t_star']}, gap={r['gap']:.0f}" for r in rows
    ) + f" ({elapsed:.1f}s)"
    return CheckResult("gap", ok, detail, rows, elapsed)


# ---------------------------------------------------------------------------
# Criterion 3: pipage demand, marginals, negative correlation
# ---------------------------------------------------------------------------

def pipage_test_instance() -> tuple[Instance, FractionalSolution]:
    """The fixed 6-candidate instance and fractional point used by the
    pipage statistics checks (sum x = 3 = k, all strictly fractional)."""
    inst = gen_random_bipartite(n=5, m=6, max_degree=3, k=3, seed=42)
    x = FractionalSolution(x=(0.15, 0.35, 0.5, 0.6, 0.7, 0.7), t_star=1.0)
    return inst, x


def crit3_pipage(trials: int = 100_000, seed: int = 7,
                 budget_s: float = 60.0) -> CheckResult:
    t0 = time.perf_counter()
    inst, x = pipage_test_instance()
    k = inst.demand
    stats = run_trials("pipage", inst, x, seeds=range(seed, seed + trials))
    rows = []
    ok = True
    # every run returned exactly k vertices (indicator row sums)
    if stats.feasibility_rate != 1.0:
        ok = False
    m = inst.n_candidates
    for v in range(m):
        sigma = math.sqrt(x.x[v] * (1 - x.x[v]) / trials)
        err = abs(stats.frequencies[v] - x.x[v])
        rows.append({"kind": "marginal", "i": v, "j": "", "freq": stats.frequencies[v],
                     "target": x.x[v], "limit": 3 * sigma})
        if err > 3 * sigma + 1e-12:
            ok = False
    pairs = 0
    for u in range(m):
        for v in range(u + 1, m):
            pairs += 1
            prod = x.x[u] * x.x[v]
            sigma = math.sqrt(max(prod * (1 - prod), 1e-12) / trials)
            joint = float(stats.joint[u, v])
            rows.append({"kind": "pair", "i": u, "j": v, "freq": joint,
                         "target": prod, "limit": 3 * sigma})
            if joint > prod + 3 * sigma:
                ok = False
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < budget_s
    detail = (
        f"{trials} trials: all {m} marginals within 3-sigma, "
        f"{pairs} pairs negatively correlated, every run |S|=k ({elapsed:.1f}s)"
    )
    return CheckResult("pipage-guarantees", ok, detail, rows, elapsed)


# ---------------------------------------------------------------------------
# Criterion 4: local-search rounding bounds on random bounded-degree instances
# ---------------------------------------------------------------------------

def _lll_bound(delta: int, opt: float, weighted: bool) -> float:
    c = 12.0 * math.log(2.0 * math.e * delta * delta)
    return c * (3.0 * opt + 1.0) if weighted else c * (opt + 2.0)


def crit4_lll(runs: int = 200, seed: int = 11) -> CheckResult:
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = []
    failures = 0
    budget_hits = 0
    half = (runs + 1) // 2
    for r in range(runs):
        weighted = r >= half
        delta = int(rng.integers(2, 5))
        n = int(rng.integers(3, 10))
        m = int(rng.integers(2, 13))
        if m > n * delta:
            m = n * delta
        k = int(rng.integers(1, m + 1))
        wr = (0.5, 3.0) if weighted else None
        inst = gen_random_bipartite(n, m, delta, k, weight_range=wr,
                                    seed=int(rng.integers(0, 2**31)))
        pre = preprocess(inst)
        work = pre.instance
        opt = brute_force_opt(inst).value
        meas_delta = degree_profile(work).max_degree
        try:
            if weighted:
                dbl = doubling(work)
                if dbl.zero_selection is not None:
                    chosen = pre.complete_selection(dbl.zero_selection)
                else:
                    norm, nx = normalize(work, dbl.t_star, dbl.x)
                    sel = lll_rounding(norm.instance, nx, make_rng(seed + r),
                                       weighted=True)
                    chosen = pre.complete_selection(norm.map_back(sel.chosen))
            else:
                x = guess_tstar_unweighted(work)
                sel = lll_rounding(work, x, make_rng(seed + r))
                chosen = pre.complete_selection(sel.chosen)
        except ResampleBudgetError:
            budget_hits += 1
            failures += 1
            continue
        value = max_disagreement(inst, chosen)
        bound = _lll_bound(max(1, meas_delta), opt, weighted)
        ok_run = len(chosen) >= inst.demand and value <= bound + 1e-9
        rows.append({"run": r, "weighted": weighted, "delta": meas_delta,
                     "k": inst.demand, "size": len(chosen), "value": value,
                     "opt": opt, "bound": bound, "ok": ok_run})
        if not ok_run:
            failures += 1
    ok = failures == 0
    detail = (
        f"{runs} seeded runs (half weighted): demand met on all, values within "
        f"the stated bounds, resample budget exhausted {budget_hits} times"
    )
    return CheckResult("lll-guarantees", ok, detail, rows)


# ---------------------------------------------------------------------------
# Criterion 5: LP thresholds are sound lower bounds
# ---------------------------------------------------------------------------

def crit5_lower_bounds(count: int = 240, seed: int = 23) -> CheckResult:
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = []
    failures = 0
    for r in range(count):
        weighted = r % 2 == 1
        delta = int(rng.integers(1, 5))
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, 11))
        if m > n * delta:
            m = n * delta
        k = int(rng.integers(1, m + 1))
        wr = (0.25, 6.0) if weighted else None
        inst = gen_random_bipartite(n, m, delta, k, weight_range=wr,
                                    seed=int(rng.integers(0, 2**31)))
        opt = brute_force_opt(inst).value
        if weighted:
            dbl = doubling(inst)
            t_star = dbl.t_star
            ok_run = t_star <= 2 * opt + 1e-9
            res = residuals(inst, dbl.x.x, t_star) if dbl.x is not None else {}
        else:
            sol = guess_tstar_unweighted(inst)
            t_star = sol.t_star
            ok_run = t_star <= opt + 1e-9
            res = residuals(inst, sol.x, t_star)
        max_res = max(res.values()) if res else 0.0
        ok_run = ok_run and max_res <= 1e-9
        rows.append({"run": r, "weighted": weighted, "t_star": t_star,
                     "opt": opt, "max_residual": max_res, "ok": ok_run})
        if not ok_run:
            failures += 1
    ok = failures == 0
    detail = f"{count} instances: every threshold a valid lower bound, residuals <= 1e-9"
    return CheckResult("lower-bounds", ok, detail, rows)


# ---------------------------------------------------------------------------
# Criterion 6: independent rounding sanity floor on a fixed instance
# ---------------------------------------------------------------------------

def crit6_independent(trials: int = 10_000, seed: int = 5) -> CheckResult:
    inst = gen_random_bipartite(n=100, m=260, max_degree=5, k=12, seed=2024)
    x = guess_tstar_unweighted(inst)
    stats = run_trials("independent", inst, x, seeds=range(seed, seed + trials))
    n = inst.n_agents
    bound = 20.0 * math.log(n) / math.log(math.log(n)) * x.t_star
    within = sum(1 for v in stats.values if v <= bound) / trials
    ok = stats.feasibility_rate >= 0.5 and within >= 0.99
    rows = [{"feasibility_rate": stats.feasibility_rate, "bound": bound,
             "within_bound_rate": within, "t_star": x.t_star}]
    detail = (
        f"{trials} trials on n=100, max degree 5: demand rate "
        f"{stats.feasibility_rate:.3f} >= 0.5, value within 20 ln n/ln ln n * T* "
        f"in {within:.3f} of trials"
    )
    return CheckResult("independent-rounding", ok, detail, rows)


# ---------------------------------------------------------------------------
# Criterion 7: incidence construction reproduces independent-set feasibility
# ---------------------------------------------------------------------------

def _has_independent_set(n_vertices: int, edges: list[tuple[int, int]], p: int) -> bool:
    edge_set = {(min(a, b), max(a, b)) for a, b in edges}
    for combo in itertools.combinations(range(n_vertices), p):
        if all((combo[i], combo[j]) not in edge_set
               for i in range(len(combo)) for j in range(i + 1, len(combo))):
            return True
    return False


def crit7_reduction(samples: int = 120, seed: int = 3) -> CheckResult:
    rng = np.random.Generator(np.random.PCG64(seed))
    graphs: list[tuple[int, list[tuple[int, int]]]] = []
    # all graphs on up to 3 vertices, then random ones up to 8 vertices
    for nv in (1, 2, 3):
        all_pairs = list(itertools.combinations(range(nv), 2))
        for bits in range(2 ** len(all_pairs)):
            edges = [all_pairs[i] for i in range(len(all_pairs)) if bits >> i & 1]
            graphs.append((nv, edges))
    while len(graphs) < samples:
        nv = int(rng.integers(4, 9))
        pairs = list(itertools.combinations(range(nv), 2))
        edges = [e for e in pairs if rng.random() < 0.4]
        graphs.append((nv, edges))
    rows = []
    failures = 0
    checks = 0
    for nv, edges in graphs:
        for p in range(1, nv + 1):
            inst = gen_incidence(edges, p, n_vertices=nv)
            opt = brute_force_opt(inst).value
            val1 = opt <= 1
            indep = _has_independent_set(nv, edges, p)
            checks += 1
            if val1 != indep:
                failures += 1
            rows.append({"n_vertices": nv, "edges": len(edges), "p": p,
                         "value1": val1, "independent_set": indep,
                         "ok": val1 == indep})
    ok = failures == 0
    detail = (
        f"{len(graphs)} graphs, {checks} (graph, p) pairs: value-1 feasibility "
        f"matches independent-set existence with {failures} mismatches"
    )
    return CheckResult("incidence-reduction", ok, detail, rows)


# ---------------------------------------------------------------------------
# Suite registry used by the CLI
# ---------------------------------------------------------------------------

def run_suite(name: str, max_m: int = 12, trials: int | None = None,
              instances: int | None = None, seed: int = 0) -> list[CheckResult]:
    if name == "exact-vs-oracle":
        budget = instances or trials or 500
        return [
            crit1_exact_vs_oracle(budget, max_m=max_m, seed=1000 + seed),
            crit7_reduction(min(budget, 120), seed=3 + seed),
        ]
    if name == "gap":
        return [crit2_gap()]
    if name == "marginals":
        return [crit3_pipage(trials or 100_000, seed=7 + seed)]
    if name == "negcorr":
        # negative correlation rides on the same trial batch as the marginals
        return [crit3_pipage(trials or 100_000, seed=7 + seed)]
    if name == "ratio-bounds":
        return [
            crit4_lll(instances or 200, seed=11 + seed),
            crit5_lower_bounds(instances or 240, seed=23 + seed),
            crit6_independent(trials or 10_000, seed=5 + seed),
        ]
    raise ValueError(f"unknown suite {name!r}")


SUITES = ("exact-vs-oracle", "marginals", "negcorr", "ratio-bounds", "gap")
