"""Command-line surface: gen, solve, lp, round, verify, bench.

JSON goes to stdout for machines, aligned tables to stderr for humans.
Exit codes: 0 success, 1 input error, 2 solver error, 3 verification failure.
Every reported objective value is recomputed from the emitted selection via
``max_disagreement``; solver-internal values are never trusted.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass

from .core import (
    Instance,
    InstanceError,
    candidate_adjacency,
    degree_profile,
    load_instance,
    max_disagreement,
    preprocess,
    save_instance,
    validate,
)
from .exact import (
    LaminarError,
    OracleCapError,
    RedBlueError,
    brute_force_opt,
    detect_laminar,
    solve_delta2_unweighted,
    solve_delta2_weighted,
    solve_laminar,
)
from .lp import LpSolverError
from .gen import (
    GenError,
    gen_gap_instance,
    gen_incidence,
    gen_path_cycle,
    gen_random_bipartite,
    gen_random_laminar,
)
from .lp import doubling, guess_tstar_unweighted, normalize, residuals, trim_to_demand
from .rounding import (
    RoundingError,
    independent_rounding,
    lll_rounding,
    make_rng,
    pipage_rounding,
    run_trials,
)
from . import verify as verify_mod

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2
EXIT_VERIFY = 3

ALGS = ("auto", "delta2", "laminar", "oracle", "lll", "pipage", "independent")


class CliInputError(Exception):
    pass


class SolverFailure(Exception):
    pass


@dataclass
class RunReport:
    n: int
    m: int
    k: int
    delta: int
    algorithm: str
    seed: int
    chosen: tuple[int, ...]
    value: float
    oracle: float | None
    ratio: float | None
    feasible: bool
    bound_ok: bool | None
    bound_note: str
    millis: float

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        d["chosen"] = list(self.chosen)
        return d


def _is_unit(instance: Instance) -> bool:
    return all(w == 1 for w in instance.weights)


def _dispatch(instance: Instance, sets, algorithm: str, seed: int,
              exact_k: bool) -> tuple[tuple[int, ...], str, float | None]:
    """Run one algorithm end to end; returns (chosen original ids, algorithm
    actually used, LP threshold when one was computed)."""
    prof = degree_profile(instance)
    alg = algorithm
    if alg == "auto":
        if prof.max_degree <= 2:
            alg = "delta2"
        elif sets is not None and detect_laminar(sets):
            alg = "laminar"
        else:
            alg = "pipage"

    if alg == "oracle":
        return brute_force_opt(instance, exact_k=exact_k).chosen, alg, None

    if alg == "laminar":
        use_sets = sets if sets is not None else candidate_adjacency(instance)
        return solve_laminar(instance, use_sets).chosen, alg, None

    pre = preprocess(instance)
    if pre.residual_demand == 0:
        return tuple(pre.removed), alg, 0.0
    work = pre.instance

    if alg == "delta2":
        sel = (solve_delta2_unweighted(work) if _is_unit(work)
               else solve_delta2_weighted(work))
        return pre.complete_selection(sel.chosen), alg, None

    if alg == "independent":
        if not _is_unit(work):
            raise SolverFailure("independent rounding handles unit weights only")
        x = guess_tstar_unweighted(work)
        sel = independent_rounding(x, work, make_rng(seed))
        return pre.complete_selection(sel.chosen), alg, x.t_star

    if alg == "pipage":
        if _is_unit(work):
            x = guess_tstar_unweighted(work)
            chosen = pipage_rounding(trim_to_demand(x, work.demand), make_rng(seed))
            return pre.complete_selection(chosen), alg, x.t_star
        dbl = doubling(work)
        if dbl.zero_selection is not None:
            return pre.complete_selection(dbl.zero_selection), alg, dbl.t_star
        norm, nx = normalize(work, dbl.t_star, dbl.x)
        chosen = pipage_rounding(trim_to_demand(nx, work.demand), make_rng(seed))
        return pre.complete_selection(norm.map_back(chosen)), alg, dbl.t_star

    if alg == "lll":
        if _is_unit(work):
            x = guess_tstar_unweighted(work)
            sel = lll_rounding(work, x, make_rng(seed))
            return pre.complete_selection(sel.chosen), alg, x.t_star
        dbl = doubling(work)
        if dbl.zero_selection is not None:
            return pre.complete_selection(dbl.zero_selection), alg, dbl.t_star
        norm, nx = normalize(work, dbl.t_star, dbl.x)
        sel = lll_rounding(norm.instance, nx, make_rng(seed), weighted=True)
        return pre.complete_selection(norm.map_back(sel.chosen)), alg, dbl.t_star

    raise CliInputError(f"unknown algorithm {alg!r}")


def _bound_check(instance: Instance, alg: str, chosen: tuple[int, ...],
                 value: float, oracle: float | None,
                 t_star: float | None) -> tuple[bool | None, str]:
    k = instance.demand
    delta = max(1, degree_profile(instance).max_degree)
    if alg in ("oracle", "delta2", "laminar"):
        if oracle is None:
            return None, "exact algorithm; oracle unavailable at this size"
        ok = abs(value - oracle) <= 1e-9 * max(1.0, abs(oracle))
        return ok, f"value equals oracle optimum {oracle}"
    if alg == "pipage":
        return len(chosen) == k, f"selected exactly k={k} candidates"
    if alg == "lll":
        if oracle is None:
            return len(chosen) >= k, "demand met; oracle unavailable at this size"
        weighted = not _is_unit(instance)
        c = 12.0 * math.log(2.0 * math.e * delta * delta)
        bound = c * (3.0 * oracle + 1.0) if weighted else c * (oracle + 2.0)
        ok = len(chosen) >= k and value <= bound + 1e-9
        return ok, f"demand met and value <= {bound:.3f}"
    if alg == "independent":
        if t_star is None or instance.n_agents < 16:
            return None, "no deterministic guarantee"
        n = instance.n_agents
        bound = 20.0 * math.log(n) / math.log(math.log(n)) * t_star
        return value <= bound + 1e-9, f"value <= {bound:.3f} (demand probabilistic)"
    return None, ""


def solve_instance(instance: Instance, sets, algorithm: str, seed: int,
                   oracle_cap: int = 16, exact_k: bool = False) -> RunReport:
    errs = validate(instance)
    if errs:
        raise CliInputError("; ".join(errs))
    t0 = time.perf_counter()
    try:
        chosen, alg_used, t_star = _dispatch(instance, sets, algorithm, seed, exact_k)
    except (InstanceError, RoundingError, OracleCapError, GenError,
            LaminarError, RedBlueError, LpSolverError) as exc:
        raise SolverFailure(str(exc)) from exc
    millis = 1000.0 * (time.perf_counter() - t0)
    value = max_disagreement(instance, chosen)
    oracle_val = None
    if instance.n_candidates <= oracle_cap and alg_used != "oracle":
        oracle_val = brute_force_opt(instance, cap=oracle_cap).value
    elif alg_used == "oracle":
        oracle_val = value
    ratio = None
    if oracle_val is not None:
        if oracle_val > 0:
            ratio = float(value) / float(oracle_val)
        elif value == 0:
            ratio = 1.0
    bound_ok, bound_note = _bound_check(
        instance, alg_used, chosen, value, oracle_val, t_star
    )
    prof = degree_profile(instance)
    return RunReport(
        n=instance.n_agents, m=instance.n_candidates, k=instance.demand,
        delta=prof.max_degree, algorithm=alg_used, seed=seed,
        chosen=tuple(chosen), value=float(value),
        oracle=None if oracle_val is None else float(oracle_val),
        ratio=ratio, feasible=len(chosen) >= instance.demand,
        bound_ok=bound_ok, bound_note=bound_note, millis=millis,
    )


def _report_table(rep: RunReport) -> str:
    rows = [
        ("agents", rep.n), ("candidates", rep.m), ("demand", rep.k),
        ("max degree", rep.delta), ("algorithm", rep.algorithm),
        ("seed", rep.seed), ("value", rep.value),
        ("oracle", rep.oracle if rep.oracle is not None else "-"),
        ("ratio", f"{rep.ratio:.3f}" if rep.ratio is not None else "-"),
        ("feasible", rep.feasible),
        ("bound ok", rep.bound_ok if rep.bound_ok is not None else "-"),
        ("millis", f"{rep.millis:.2f}"),
    ]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"  {k:<{width}}  {v}" for k, v in rows)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def cmd_gen(args: argparse.Namespace) -> int:
    fam = args.family
    wr = None
    if args.weights:
        lo, hi = args.weights.split(",")
        wr = (float(lo), float(hi))
    sets = None
    if fam == "gap":
        inst = gen_gap_instance(args.k)
    elif fam == "incidence":
        edges = []
        if args.edges:
            for tok in args.edges.split(","):
                a, b = tok.split("-")
                edges.append((int(a), int(b)))
        inst = gen_incidence(edges, args.p, n_vertices=args.n)
    elif fam == "random-bipartite":
        inst = gen_random_bipartite(args.n, args.m, args.delta, args.k,
                                    weight_range=wr, seed=args.seed,
                                    integer_weights=args.int_weights)
    elif fam == "random-laminar":
        sets, weights = gen_random_laminar(args.n, args.sets, weight_range=wr,
                                           seed=args.seed,
                                           integer_weights=args.int_weights)
        from .core import instance_from_sets

        inst = instance_from_sets(args.n, sets, args.k, weights)
    elif fam == "path-cycle":
        comps = []
        for tok in args.components.split(","):
            kind, ell = tok.split(":")
            comps.append((kind, int(ell)))
        inst = gen_path_cycle(comps, args.k, weight_range=wr, seed=args.seed,
                              integer_weights=args.int_weights)
    else:
        raise CliInputError(f"unknown family {fam!r}")
    if args.output:
        save_instance(inst, args.output, sets=sets)
        print(f"wrote {args.output}", file=sys.stderr)
    else:
        save_instance(inst, sys.stdout, sets=sets)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    instance, sets = load_instance(args.file)
    rep = solve_instance(instance, sets, args.alg, args.seed,
                         oracle_cap=args.oracle_cap, exact_k=args.exact_k)
    print(json.dumps(rep.to_json()))
    print(_report_table(rep), file=sys.stderr)
    return EXIT_OK


def cmd_lp(args: argparse.Namespace) -> int:
    instance, _ = load_instance(args.file)
    errs = validate(instance)
    if errs:
        raise CliInputError("; ".join(errs))
    pre = preprocess(instance)
    out: dict = {"removed_candidates": list(pre.removed)}
    if pre.residual_demand == 0:
        out.update({"mode": "preprocessing-solved", "t_star": 0.0, "x": [],
                    "residuals": {}})
        print(json.dumps(out))
        return EXIT_OK
    work = pre.instance
    if _is_unit(work):
        sol = guess_tstar_unweighted(work)
        mode = "unweighted-binary-search"
        t_star, x = sol.t_star, sol.x
    else:
        dbl = doubling(work)
        if dbl.zero_selection is not None:
            out.update({"mode": "zero-weight-shortcut", "t_star": 0.0,
                        "selection": [pre.kept[j] for j in dbl.zero_selection],
                        "residuals": {}})
            print(json.dumps(out))
            return EXIT_OK
        mode = "weighted-doubling"
        t_star, x = dbl.t_star, dbl.x.x
    res = residuals(work, x, t_star)
    x_orig = [0.0] * instance.n_candidates
    for j, v in enumerate(pre.kept):
        x_orig[v] = x[j]
    out.update({"mode": mode, "t_star": t_star, "x": x_orig, "residuals": res})
    print(json.dumps(out))
    print(f"  T* = {t_star}  (mode: {mode}, max residual "
          f"{max(res.values()):.2e})", file=sys.stderr)
    return EXIT_OK


def cmd_round(args: argparse.Namespace) -> int:
    instance, _ = load_instance(args.file)
    errs = validate(instance)
    if errs:
        raise CliInputError("; ".join(errs))
    pre = preprocess(instance)
    if pre.residual_demand == 0:
        print(json.dumps({"algorithm": args.alg, "trials": 0,
                          "note": "preprocessing satisfied the demand"}))
        return EXIT_OK
    work = pre.instance
    weighted = not _is_unit(work)
    norm = None
    if weighted:
        if args.alg == "independent":
            raise SolverFailure("independent rounding handles unit weights only")
        dbl = doubling(work)
        if dbl.zero_selection is not None:
            print(json.dumps({"algorithm": args.alg, "trials": 0,
                              "note": "zero-weight shortcut solved the instance"}))
            return EXIT_OK
        norm, x = normalize(work, dbl.t_star, dbl.x)
        run_inst, t_star = norm.instance, dbl.t_star
    else:
        x = guess_tstar_unweighted(work)
        run_inst, t_star = work, x.t_star
    seeds = range(args.seed, args.seed + args.trials)
    stats = run_trials(args.alg, run_inst, x, seeds, weighted=weighted)
    scale = norm.scale if (weighted and norm is not None) else 1.0
    summary = {
        "algorithm": args.alg,
        "trials": stats.trials,
        "t_star": t_star,
        "feasibility_rate": stats.feasibility_rate,
        "mean_value": scale * float(sum(stats.values)) / max(1, len(stats.values)),
        "max_value": scale * max(stats.values, default=0.0),
        "removed_candidates": list(pre.removed),
    }
    print(json.dumps(summary))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["section", "i", "j", "x", "weight", "frequency",
                        "contribution", "joint"])
            for j in range(run_inst.n_candidates):
                orig = norm.kept[j] if norm is not None else j
                orig = pre.kept[orig]
                w.writerow(["candidate", orig, "", x.x[j],
                            run_inst.weights[j], stats.frequencies[j],
                            stats.contributions[j], ""])
            for a in range(run_inst.n_candidates):
                for b in range(a + 1, run_inst.n_candidates):
                    w.writerow(["pair", a, b, "", "", "", "",
                                float(stats.joint[a, b])])
        print(f"wrote {args.csv}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = verify_mod.run_suite(args.suite, max_m=args.max_m,
                                   trials=args.trials,
                                   instances=args.instances, seed=args.seed)
    rows = []
    for r in results:
        print(r.line)
        for row in r.rows:
            rows.append({"check": r.name, **row})
    if args.csv and rows:
        keys: list[str] = []
        for row in rows:
            for key in row:
                if key not in keys:
                    keys.append(key)
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=keys)
            w.writeheader()
            w.writerows(rows)
        print(f"wrote {args.csv}", file=sys.stderr)
    return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY


BENCH_FAMILIES = ("gap2", "gap3", "rb-d2", "rb-d3", "rb-w3", "laminar", "path-cycle")


def _bench_instance(family: str, seed: int):
    if family == "gap2":
        return gen_gap_instance(2), None
    if family == "gap3":
        return gen_gap_instance(3), None
    if family == "rb-d2":
        return gen_random_bipartite(6, 8, 2, 3, seed=seed), None
    if family == "rb-d3":
        return gen_random_bipartite(8, 10, 3, 3, seed=seed), None
    if family == "rb-w3":
        return gen_random_bipartite(8, 10, 3, 3, weight_range=(0.5, 4.0),
                                    seed=seed), None
    if family == "laminar":
        sets, weights = gen_random_laminar(8, 8, weight_range=(1, 9), seed=seed,
                                           integer_weights=True)
        from .core import instance_from_sets

        return instance_from_sets(8, sets, 3, weights), sets
    if family == "path-cycle":
        return gen_path_cycle([("path", 3), ("cycle", 4)], 3), None
    raise CliInputError(f"unknown bench family {family!r}; "
                        f"known: {', '.join(BENCH_FAMILIES)}")


def cmd_bench(args: argparse.Namespace) -> int:
    families = args.families.split(",")
    algorithms = args.algorithms.split(",")
    seeds = [int(s) for s in args.seeds.split(",")]
    for alg in algorithms:
        if alg not in ALGS:
            raise CliInputError(f"unknown algorithm {alg!r}")
    rows = []
    for family in families:
        for alg in algorithms:
            for seed in seeds:
                base = {"family": family, "alg": alg, "seed": seed}
                try:
                    inst, sets = _bench_instance(family, seed)
                    rep = solve_instance(inst, sets, alg, seed)
                    rows.append({
                        **base, "n": rep.n, "m": rep.m, "k": rep.k,
                        "delta": rep.delta, "value": rep.value,
                        "oracle": "" if rep.oracle is None else rep.oracle,
                        "ratio": "" if rep.ratio is None else round(rep.ratio, 6),
                        "feasible": rep.feasible, "millis": round(rep.millis, 3),
                    })
                except (CliInputError, SolverFailure, InstanceError) as exc:
                    rows.append({**base, "n": "", "m": "", "k": "", "delta": "",
                                 "value": "", "oracle": "", "ratio": "",
                                 "feasible": False, "millis": "",
                                 })
                    print(f"  {family}/{alg}/seed={seed}: {exc}", file=sys.stderr)
    rows.sort(key=lambda r: (r["family"], r["alg"], r["seed"]))
    cols = ["family", "n", "m", "k", "delta", "alg", "seed", "value", "oracle",
            "ratio", "feasible", "millis"]
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=cols, extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.output:
            out.close()
            print(f"wrote {args.output}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairksel",
                                description="Fair k-set selection toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--family", required=True,
                   choices=["gap", "incidence", "random-bipartite",
                            "random-laminar", "path-cycle"])
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--m", type=int, default=10)
    g.add_argument("--delta", type=int, default=3)
    g.add_argument("--sets", type=int, default=6)
    g.add_argument("--p", type=int, default=1)
    g.add_argument("--edges", default="", help="incidence edges, e.g. 0-1,1-2")
    g.add_argument("--components", default="path:3",
                   help="path-cycle components, e.g. path:3,cycle:4")
    g.add_argument("--weights", default="", help="weight range lo,hi")
    g.add_argument("--int-weights", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", default="")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("file")
    s.add_argument("--alg", default="auto", choices=ALGS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--oracle-cap", type=int, default=16)
    s.add_argument("--exact-k", action="store_true",
                   help="restrict the oracle to size-k selections (value-identical)")
    s.set_defaults(func=cmd_solve)

    l = sub.add_parser("lp", help="LP threshold search: T*, witness, residuals")
    l.add_argument("file")
    l.set_defaults(func=cmd_lp)

    r = sub.add_parser("round", help="run a randomized rounding, with trials")
    r.add_argument("file")
    r.add_argument("--alg", required=True, choices=["independent", "pipage", "lll"])
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--csv", default="")
    r.set_defaults(func=cmd_round)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=list(verify_mod.SUITES))
    v.add_argument("--max-m", type=int, default=12)
    v.add_argument("--trials", type=int, default=None)
    v.add_argument("--instances", type=int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--csv", default="")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="cross-product experiment grid to CSV")
    b.add_argument("--families", default="gap2,rb-d3")
    b.add_argument("--algorithms", default="oracle,pipage")
    b.add_argument("--seeds", default="0")
    b.add_argument("-o", "--output", default="")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliInputError, InstanceError, GenError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverFailure, RoundingError, OracleCapError, LaminarError,
            RedBlueError, LpSolverError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
