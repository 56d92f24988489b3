"""Instance generators: worst-case constructions and seeded random families."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Instance, Number, make_instance


class GenError(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    """A named family plus its parameters; seeded generation is reproducible."""

    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0


def gen_gap_instance(k: int) -> Instance:
    """The integrality-gap construction: k^2 candidates, one agent per
    k-subset of them, wired to exactly its subset (unit weights, demand k).

    Any size-k selection is seen in full by the agent of that very subset, so
    the integral optimum is k, while spreading 1/k mass per candidate keeps
    every agent's fractional load at 1: measured gap exactly k.  Agent order
    is the lexicographic order of the subsets.
    """
    if not 2 <= k <= 4:
        raise GenError("k must be in 2..4 (the agent side grows as C(k^2, k))")
    m = k * k
    adjacency = [list(sub) for sub in itertools.combinations(range(m), k)]
    return make_instance(adjacency, m, k)


def gen_incidence(edges: Sequence[tuple[int, int]], p: int,
                  n_vertices: int | None = None) -> Instance:
    """Edge-incidence instance of a simple graph: one agent per edge adjacent
    to that edge's two endpoint candidates; demand p.

    The source graph has an independent set of size p exactly when this
    instance admits a selection of maximum disagreement at most 1 (no two
    selected endpoints may share an edge-agent).
    """
    seen = set()
    for a, b in edges:
        if a == b:
            raise GenError(f"self-loop at vertex {a}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise GenError(f"parallel edge {key}")
        seen.add(key)
    max_v = max((max(a, b) for a, b in edges), default=-1)
    m = max_v + 1 if n_vertices is None else n_vertices
    if m <= max_v:
        raise GenError("n_vertices too small for the edge list")
    if not 1 <= p <= m:
        raise GenError("p out of range")
    adjacency = [sorted((a, b)) for a, b in edges]
    return make_instance(adjacency, m, p)


def gen_random_bipartite(
    n: int,
    m: int,
    max_degree: int,
    k: int,
    weight_range: tuple[float, float] | None = None,
    seed: int = 0,
    integer_weights: bool = False,
) -> Instance:
    """Random bipartite instance with all degrees <= max_degree and no
    isolated candidate; weights unit, or uniform in weight_range (integers
    on request for bit-exact oracle comparison)."""
    if max_degree < 1:
        raise GenError("max_degree must be >= 1")
    if not 1 <= k <= m:
        raise GenError("k out of range")
    if n < 1 or m < 1:
        raise GenError("both sides must be nonempty")
    if m > n * max_degree:
        raise GenError("infeasible: candidates cannot all reach degree 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    agent_cap = [max_degree] * n
    cap_total = n * max_degree
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for v in range(m):
        avail = [u for u in range(n) if agent_cap[u] > 0]
        # keep one capacity slot per still-unplaced candidate
        d_max = min(max_degree, len(avail), cap_total - (m - v - 1))
        if d_max < 1:
            raise GenError("could not place all candidates within the degree budget")
        d = int(rng.integers(1, d_max + 1))
        picks = rng.choice(len(avail), size=d, replace=False)
        for i in picks:
            u = avail[int(i)]
            adjacency[u].append(v)
            agent_cap[u] -= 1
        cap_total -= d
    weights: list[Number] | None = None
    if weight_range is not None:
        lo, hi = weight_range
        if lo < 0 or hi < lo:
            raise GenError("bad weight range")
        if integer_weights:
            weights = [int(rng.integers(int(lo), int(hi) + 1)) for _ in range(m)]
        else:
            weights = [float(w) for w in rng.uniform(lo, hi, size=m)]
    return make_instance(adjacency, m, k, weights)


def gen_random_laminar(
    n_elements: int,
    n_sets: int,
    weight_range: tuple[float, float] | None = None,
    seed: int = 0,
    integer_weights: bool = False,
) -> tuple[tuple[tuple[int, ...], ...], tuple[Number, ...]]:
    """Random laminar family over {0..n_elements-1} by recursive partitioning.

    The partition tree's node sets form a laminar pool (at most 2n - 1
    distinct sets); n_sets of them are sampled without replacement, so the
    output is laminar by construction.
    """
    if n_elements < 1:
        raise GenError("need at least one element")
    if n_sets < 1:
        raise GenError("need at least one set")
    rng = np.random.Generator(np.random.PCG64(seed))
    pool: list[tuple[int, ...]] = []

    def split(elems: list[int]) -> None:
        pool.append(tuple(elems))
        if len(elems) == 1:
            return
        cut = int(rng.integers(1, len(elems)))
        order = list(elems)
        rng.shuffle(order)
        split(sorted(order[:cut]))
        split(sorted(order[cut:]))

    split(list(range(n_elements)))
    uniq = sorted(set(pool), key=lambda s: (len(s), s))
    if n_sets > len(uniq):
        raise GenError(
            f"n_sets={n_sets} exceeds the {len(uniq)} distinct laminar sets available"
        )
    picks = rng.choice(len(uniq), size=n_sets, replace=False)
    sets = tuple(uniq[int(i)] for i in sorted(picks))
    if weight_range is None:
        weights: tuple[Number, ...] = tuple(1 for _ in range(n_sets))
    else:
        lo, hi = weight_range
        if integer_weights:
            weights = tuple(int(rng.integers(int(lo), int(hi) + 1)) for _ in range(n_sets))
        else:
            weights = tuple(float(w) for w in rng.uniform(lo, hi, size=n_sets))
    return sets, weights


def gen_path_cycle(
    components: Sequence[tuple[str, int]],
    k: int,
    weight_range: tuple[float, float] | None = None,
    seed: int = 0,
    integer_weights: bool = False,
) -> Instance:
    """Degree-2 instance from explicit alternating components.

    Each component is ("path", l) or ("cycle", l) with l candidates; paths
    carry l + 1 agents (agent endpoints), cycles l agents, so candidates
    always have degree 2 within their component.  Cycles need l >= 2.
    """
    adjacency: list[list[int]] = []
    n_cand = 0
    for kind, ell in components:
        if ell < 1:
            raise GenError("component needs at least one candidate")
        base_c = n_cand
        if kind == "path":
            # agents a_0 .. a_l, candidate i between a_i and a_{i+1}
            rows = [[] for _ in range(ell + 1)]
            for i in range(ell):
                rows[i].append(base_c + i)
                rows[i + 1].append(base_c + i)
            adjacency.extend(rows)
        elif kind == "cycle":
            if ell < 2:
                raise GenError("cycle needs at least two candidates")
            rows = [[] for _ in range(ell)]
            for i in range(ell):
                rows[i].append(base_c + i)
                rows[(i + 1) % ell].append(base_c + i)
            adjacency.extend(rows)
        else:
            raise GenError(f"unknown component kind {kind!r}")
        n_cand += ell
    if not 1 <= k <= n_cand:
        raise GenError("k out of range")
    weights: list[Number] | None = None
    if weight_range is not None:
        rng = np.random.Generator(np.random.PCG64(seed))
        lo, hi = weight_range
        if integer_weights:
            weights = [int(rng.integers(int(lo), int(hi) + 1)) for _ in range(n_cand)]
        else:
            weights = [float(w) for w in rng.uniform(lo, hi, size=n_cand)]
    return make_instance(adjacency, n_cand, k, weights)


def generate(spec: GenSpec) -> Instance:
    """Dispatch a GenSpec to its generator (bipartite-instance families)."""
    fam, p = spec.family, dict(spec.params)
    if fam == "gap":
        return gen_gap_instance(int(p["k"]))
    if fam == "incidence":
        return gen_incidence([tuple(e) for e in p["edges"]], int(p["p"]),
                             p.get("n_vertices"))
    if fam == "random-bipartite":
        return gen_random_bipartite(
            int(p["n"]), int(p["m"]), int(p["delta"]), int(p["k"]),
            weight_range=p.get("weight_range"), seed=spec.seed,
            integer_weights=bool(p.get("integer_weights", False)),
        )
    if fam == "random-laminar":
        from .core import instance_from_sets

        sets, weights = gen_random_laminar(
            int(p["n"]), int(p["sets"]), weight_range=p.get("weight_range"),
            seed=spec.seed, integer_weights=bool(p.get("integer_weights", False)),
        )
        return instance_from_sets(int(p["n"]), sets, int(p["k"]), weights)
    if fam == "path-cycle":
        return gen_path_cycle(
            [tuple(c) for c in p["components"]], int(p["k"]),
            weight_range=p.get("weight_range"), seed=spec.seed,
            integer_weights=bool(p.get("integer_weights", False)),
        )
    raise GenError(f"unknown family {fam!r}")
