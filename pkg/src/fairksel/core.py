"""Bipartite instances for fair k-set selection and the shared objective.

An instance is a bipartite graph: *agents* on one side, *candidates* on the
other, a nonnegative weight per candidate, and a demand ``k``.  A solution
selects at least ``k`` candidates; each agent's *disagreement* is the total
weight of its selected neighbors, and every solver in this package minimizes
the maximum disagreement over agents.

Candidates double as sets over the agents (candidate ``v``'s set is its
neighborhood), so a set system with element universe ``{0..n-1}`` and ``m``
weighted sets is the same object.  All ids are dense integers: agents
``0..n-1``, candidates ``0..m-1``.  Index order matters downstream (several
algorithms break ties by lowest index), so generators and file I/O preserve
it.

Everything here is a pure function of its inputs; instances are frozen and
safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence, Union

Number = Union[int, float]


class InstanceError(ValueError):
    """Raised when an operation receives an invalid instance or selection."""


@dataclass(frozen=True)
class Instance:
    """A bipartite fair-selection instance.

    adjacency maps each agent to the sorted, duplicate-free tuple of its
    candidate neighbors.  Weights stay ``int`` when given as ints so the
    exact solvers can be compared bit-for-bit against the oracle.
    """

    n_agents: int
    n_candidates: int
    adjacency: tuple[tuple[int, ...], ...]
    weights: tuple[Number, ...]
    demand: int

    def agent_neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]


@dataclass(frozen=True)
class Selection:
    """A chosen candidate set together with its recomputed objective value."""

    chosen: tuple[int, ...]
    value: Number


@dataclass(frozen=True)
class DegreeProfile:
    max_degree: int
    max_agent_degree: int
    max_candidate_degree: int


@dataclass(frozen=True)
class PreprocessResult:
    """Outcome of dropping isolated candidates.

    ``instance`` is the residual instance (renumbered candidates, reduced
    demand), ``kept[j]`` is the original id of residual candidate ``j``, and
    ``removed`` lists the dropped original ids.  ``complete_selection`` maps a
    residual selection back to the original id space and re-adds the dropped
    candidates, which cost nothing and restore the original demand.
    """

    instance: Instance
    kept: tuple[int, ...]
    removed: tuple[int, ...]
    original: Instance

    @property
    def residual_demand(self) -> int:
        return self.instance.demand

    def complete_selection(self, residual_chosen: Iterable[int]) -> tuple[int, ...]:
        mapped = [self.kept[j] for j in residual_chosen]
        return tuple(sorted(mapped + list(self.removed)))


def make_instance(
    adjacency: Sequence[Iterable[int]],
    n_candidates: int,
    demand: int,
    weights: Sequence[Number] | None = None,
) -> Instance:
    """Normalize raw adjacency lists into an Instance (sorted, deduplicated)."""
    adj = tuple(tuple(sorted(set(int(v) for v in nbrs))) for nbrs in adjacency)
    if weights is None:
        w: tuple[Number, ...] = tuple(1 for _ in range(n_candidates))
    else:
        w = tuple(weights)
    return Instance(
        n_agents=len(adj),
        n_candidates=int(n_candidates),
        adjacency=adj,
        weights=w,
        demand=int(demand),
    )


def validate(instance: Instance) -> list[str]:
    """Return the list of violated instance invariants (empty means valid)."""
    errs: list[str] = []
    n, m = instance.n_agents, instance.n_candidates
    if n < 0 or m < 0:
        errs.append("negative side size")
    if len(instance.adjacency) != n:
        errs.append(f"adjacency has {len(instance.adjacency)} rows, expected {n}")
    if len(instance.weights) != m:
        errs.append(f"weights has {len(instance.weights)} entries, expected {m}")
    for u, nbrs in enumerate(instance.adjacency):
        for v in nbrs:
            if not 0 <= v < m:
                errs.append(f"agent {u}: candidate index {v} out of range")
        if len(set(nbrs)) != len(nbrs):
            errs.append(f"agent {u}: duplicate neighbor")
        if tuple(sorted(nbrs)) != tuple(nbrs):
            errs.append(f"agent {u}: neighbors not sorted")
    for v, w in enumerate(instance.weights):
        if w < 0:
            errs.append(f"candidate {v}: negative weight")
    if instance.demand < 1:
        errs.append("demand must be >= 1")
    if instance.demand > m:
        errs.append(f"demand {instance.demand} exceeds candidate count {m}")
    return errs


def require_valid(instance: Instance) -> None:
    errs = validate(instance)
    if errs:
        raise InstanceError("; ".join(errs))


def candidate_adjacency(instance: Instance) -> tuple[tuple[int, ...], ...]:
    """Per-candidate sorted agent neighborhoods (the set-system view)."""
    nbrs: list[list[int]] = [[] for _ in range(instance.n_candidates)]
    for u, row in enumerate(instance.adjacency):
        for v in row:
            nbrs[v].append(u)
    return tuple(tuple(sorted(a)) for a in nbrs)


def candidate_degrees(instance: Instance) -> tuple[int, ...]:
    deg = [0] * instance.n_candidates
    for row in instance.adjacency:
        for v in row:
            deg[v] += 1
    return tuple(deg)


def degree_profile(instance: Instance) -> DegreeProfile:
    """Exact maximum degree, overall and per side."""
    agent_max = max((len(r) for r in instance.adjacency), default=0)
    cand_max = max(candidate_degrees(instance), default=0)
    return DegreeProfile(
        max_degree=max(agent_max, cand_max),
        max_agent_degree=agent_max,
        max_candidate_degree=cand_max,
    )


def preprocess(instance: Instance) -> PreprocessResult:
    """Drop every degree-0 candidate and decrease the demand by 1 per drop.

    The residual instance is equivalent: isolated candidates contribute no
    disagreement, so any solver may add them back for free.  The residual
    demand can reach 0, in which case callers should return the removed
    candidates themselves as a value-0 solution.
    """
    deg = candidate_degrees(instance)
    kept = tuple(v for v in range(instance.n_candidates) if deg[v] > 0)
    removed = tuple(v for v in range(instance.n_candidates) if deg[v] == 0)
    if not removed:
        return PreprocessResult(instance, kept, removed, instance)
    old_to_new = {v: j for j, v in enumerate(kept)}
    adj = tuple(
        tuple(old_to_new[v] for v in row) for row in instance.adjacency
    )
    residual = Instance(
        n_agents=instance.n_agents,
        n_candidates=len(kept),
        adjacency=adj,
        weights=tuple(instance.weights[v] for v in kept),
        demand=max(0, instance.demand - len(removed)),
    )
    return PreprocessResult(residual, kept, removed, instance)


def max_disagreement(instance: Instance, chosen: Iterable[int]) -> Number:
    """Maximum over agents of the total weight of chosen neighbors.

    Returns 0 when there are no agents or nothing is chosen.  Integer
    weights produce an integer result.
    """
    chosen_set = set(chosen)
    for v in chosen_set:
        if not 0 <= v < instance.n_candidates:
            raise InstanceError(f"candidate id {v} out of range")
    if not chosen_set or instance.n_agents == 0:
        return 0
    best: Number = 0
    w = instance.weights
    for row in instance.adjacency:
        load = sum(w[v] for v in row if v in chosen_set)
        if load > best:
            best = load
    return best


def as_selection(instance: Instance, chosen: Iterable[int]) -> Selection:
    """Build a Selection with the objective recomputed from scratch."""
    tup = tuple(sorted(set(chosen)))
    return Selection(chosen=tup, value=max_disagreement(instance, tup))


# ---------------------------------------------------------------------------
# Instance file format (JSON), shared by the CLI and the generators:
#   {"n": <agents>, "m": <candidates>, "k": <demand>,
#    "weights": [m reals],          # omitted => all 1
#    "adj": [n arrays of candidate indices]}
# Laminar set systems replace "adj" with "sets": m arrays of element indices;
# they are flattened to the bipartite form on load (element u is adjacent to
# every set containing it) and the raw sets are returned alongside.
# ---------------------------------------------------------------------------


def instance_from_sets(
    n_elements: int,
    sets: Sequence[Iterable[int]],
    demand: int,
    weights: Sequence[Number] | None = None,
) -> Instance:
    """Flatten a set system over ``{0..n_elements-1}`` to the bipartite form."""
    adj: list[list[int]] = [[] for _ in range(n_elements)]
    for j, members in enumerate(sets):
        for e in members:
            if not 0 <= e < n_elements:
                raise InstanceError(f"set {j}: element {e} out of range")
            adj[e].append(j)
    return make_instance(adj, len(sets), demand, weights)


def instance_to_dict(instance: Instance) -> dict:
    d = {
        "n": instance.n_agents,
        "m": instance.n_candidates,
        "k": instance.demand,
        "adj": [list(r) for r in instance.adjacency],
    }
    if any(w != 1 for w in instance.weights):
        d["weights"] = list(instance.weights)
    return d


def instance_from_dict(data: dict) -> tuple[Instance, tuple[tuple[int, ...], ...] | None]:
    """Parse the JSON instance format; returns (instance, sets-or-None)."""
    try:
        n = int(data["n"])
        m = int(data["m"])
        k = int(data["k"])
    except KeyError as exc:
        raise InstanceError(f"missing field {exc}") from exc
    weights = data.get("weights")
    if weights is not None and len(weights) != m:
        raise InstanceError("weights length does not match m")
    if "sets" in data:
        sets = tuple(tuple(sorted(set(map(int, s)))) for s in data["sets"])
        if len(sets) != m:
            raise InstanceError("sets length does not match m")
        return instance_from_sets(n, sets, k, weights), sets
    if "adj" not in data:
        raise InstanceError("instance needs either 'adj' or 'sets'")
    adj = data["adj"]
    if len(adj) != n:
        raise InstanceError("adj length does not match n")
    inst = make_instance(adj, m, k, weights)
    return inst, None


def load_instance(fp: IO[str] | str) -> tuple[Instance, tuple[tuple[int, ...], ...] | None]:
    if isinstance(fp, str):
        with open(fp, "r", encoding="utf-8") as fh:
            return instance_from_dict(json.load(fh))
    return instance_from_dict(json.load(fp))


def save_instance(instance: Instance, fp: IO[str] | str,
                  sets: Sequence[Iterable[int]] | None = None) -> None:
    d = instance_to_dict(instance)
    if sets is not None:
        d.pop("adj")
        d["sets"] = [sorted(s) for s in sets]
    if isinstance(fp, str):
        with open(fp, "w", encoding="utf-8") as fh:
            json.dump(d, fh)
            fh.write("\n")
    else:
        json.dump(d, fp)
        fp.write("\n")
