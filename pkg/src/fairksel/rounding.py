"""Randomized roundings of the feasibility-LP solution.

Three algorithms, unweighted and weighted:

* independent rounding: boost each small LP value by s(n) = 10 ln n / ln ln n
  and sample independently; demand is met only with high probability,
* pipage rounding: repeatedly move the two lowest-index fractional
  coordinates in opposite directions until integral; preserves marginals
  exactly, the selected count equals k surely, and the indicators are
  negatively correlated,
* local-search rounding: boost probabilities by 4 ln(2e Delta^2), fix the
  saturated candidates, and clean up the residual sampling with bad-event
  resampling until no per-agent overload and no per-group shortfall occurs;
  the demand gap at the end is at most one vertex.

Every run is deterministic given (instance, x, seed); trials with distinct
seeds are embarrassingly parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    Instance,
    Selection,
    as_selection,
    degree_profile,
)
from .lp import FractionalSolution, trim_to_demand

FRAC_EPS = 1e-9

Rng = np.random.Generator


class RoundingError(RuntimeError):
    pass


class ResampleBudgetError(RoundingError):
    """The resampling loop exhausted its budget: a construction bug, since
    the expected number of resamples is bounded by the event count."""


def make_rng(seed: int | Rng) -> Rng:
    """Seedable uniform-[0,1) stream; equal seeds reproduce runs bit-for-bit."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(int(seed)))


# ---------------------------------------------------------------------------
# Independent rounding
# ---------------------------------------------------------------------------

def boost_factor(n_agents: int) -> float:
    """s(n) = 10 ln n / ln ln n; defined and > 1 only for n >= 16."""
    if n_agents < 16:
        raise RoundingError("n < 16: boost factor undefined, use pipage")
    return 10.0 * math.log(n_agents) / math.log(math.log(n_agents))


def independent_rounding(
    x: FractionalSolution, instance: Instance, rng: int | Rng
) -> Selection:
    """Sample each small-value candidate independently with boosted probability.

    Candidates with x_v at or above ln ln n / (10 ln n) are taken outright;
    if the remaining LP mass is at most 1, a single (lowest-index) leftover
    candidate joins instead of sampling.  The result can violate the demand
    (only met with high probability).
    """
    if any(w != 1 for w in instance.weights):
        raise RoundingError("independent rounding requires unit weights")
    s = boost_factor(instance.n_agents)
    thresh = 1.0 / s
    a_side = [v for v in range(instance.n_candidates) if x.x[v] >= thresh]
    b_side = [v for v in range(instance.n_candidates) if x.x[v] < thresh]
    chosen = list(a_side)
    if b_side:
        mass = sum(x.x[v] for v in b_side)
        if mass <= 1.0:
            chosen.append(b_side[0])
        else:
            gen = make_rng(rng)
            draws = gen.random(len(b_side))
            for v, u in zip(b_side, draws):
                if u < s * x.x[v]:
                    chosen.append(v)
    return as_selection(instance, chosen)


# ---------------------------------------------------------------------------
# Pipage rounding
# ---------------------------------------------------------------------------

def pipage_rounding(x: FractionalSolution, rng: int | Rng) -> tuple[int, ...]:
    """Round a fractional solution with sum exactly k to a size-k set.

    Each iteration takes the two lowest-index fractional coordinates and
    shifts them in opposite directions, the shift magnitudes chosen so one
    endpoint hits {0, 1}; the direction is randomized with the probability
    that keeps every marginal exactly at x_v.  The coordinate sum is
    invariant at every step and at most m - 1 iterations occur.
    """
    xs = np.asarray(x.x, dtype=float)
    m = xs.size
    k = int(round(float(xs.sum())))
    if abs(float(xs.sum()) - k) > FRAC_EPS * max(1, m):
        raise RoundingError(f"sum x = {xs.sum()} is not integral; trim first")
    if np.any(xs < -FRAC_EPS) or np.any(xs > 1 + FRAC_EPS):
        raise RoundingError("coordinates outside [0, 1]")
    gen = make_rng(rng)
    iterations = 0
    while True:
        frac = np.flatnonzero((xs > FRAC_EPS) & (xs < 1 - FRAC_EPS))
        if frac.size == 0:
            break
        if frac.size == 1:
            # numerically stranded single coordinate; its exact value must be
            # integral because the total is, so snap it
            xs[frac[0]] = round(xs[frac[0]])
            break
        u, v = int(frac[0]), int(frac[1])
        d1 = min(xs[u], 1.0 - xs[v])
        d2 = min(1.0 - xs[u], xs[v])
        p = d2 / (d1 + d2)
        if gen.random() < p:
            xs[u] = 0.0 if d1 == xs[u] else xs[u] - d1
            xs[v] = 1.0 if d1 == 1.0 - xs[v] else xs[v] + d1
        else:
            xs[u] = 1.0 if d2 == 1.0 - xs[u] else xs[u] + d2
            xs[v] = 0.0 if d2 == xs[v] else xs[v] - d2
        iterations += 1
        assert abs(float(xs.sum()) - k) <= FRAC_EPS * max(1, m), "sum drifted"
        assert iterations <= m, "pipage failed to make progress"
    xs = np.where(xs <= FRAC_EPS, 0.0, xs)
    xs = np.where(xs >= 1 - FRAC_EPS, 1.0, xs)
    chosen = tuple(int(v) for v in np.flatnonzero(xs == 1.0))
    if len(chosen) != k:
        raise RoundingError(f"pipage produced {len(chosen)} != k = {k} vertices")
    return chosen


# ---------------------------------------------------------------------------
# Bad events and resampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerformanceEvent:
    """Per-agent overload event: occurs when the (weighted) selected-neighbor
    count reaches 8 ln(2e Delta^2) (T* + 1)."""

    agent: int
    variables: tuple[int, ...]
    threshold: float
    weights: tuple[float, ...]

    def occurs(self, assignment: dict[int, int]) -> bool:
        tot = sum(w for v, w in zip(self.variables, self.weights) if assignment[v])
        return tot >= self.threshold


@dataclass(frozen=True)
class FeasibilityEvent:
    """Per-group shortfall event: occurs when fewer candidates are selected
    in the group than the group's LP mass."""

    group: int
    variables: tuple[int, ...]
    target: float

    def occurs(self, assignment: dict[int, int]) -> bool:
        return sum(assignment[v] for v in self.variables) < self.target


@dataclass(frozen=True)
class BadEventSystem:
    variables: tuple[int, ...]          # residual candidate ids, ascending
    probs: tuple[float, ...]            # aligned selection probabilities
    performance_events: tuple[PerformanceEvent, ...]
    feasibility_events: tuple[FeasibilityEvent, ...]
    groups: tuple[tuple[int, ...], ...]
    dependency_degree: int

    @property
    def events(self) -> tuple:
        """Resampling order: agent events by agent id, then group events."""
        return self.performance_events + self.feasibility_events


def selection_probability(x_v: float, delta: int) -> float:
    """min(1, (x_v + 1/Delta) * 4 ln(2e Delta^2))."""
    return min(1.0, (x_v + 1.0 / delta) * 4.0 * math.log(2.0 * math.e * delta * delta))


def build_bad_events(
    instance: Instance,
    x: FractionalSolution,
    t_star: float,
    delta: int,
    weighted: bool = False,
    fixed: Iterable[int] = (),
    allow_saturated: bool = False,
) -> BadEventSystem:
    """Construct the residual bad-event system after the fixed-choice phase.

    Residual candidates are those outside ``fixed``; agents without residual
    neighbors drop out.  Groups are consecutive blocks of Delta residual
    candidates by index; every full-size group gets a shortfall event and the
    trailing group gets one exactly when its boosted mass reaches 1.  Events
    are adjacent in the dependency graph when their variable sets intersect.

    Residual probabilities must be < 1 (otherwise the fixed-choice phase was
    incomplete); pass ``allow_saturated`` to clamp instead when building a
    system for structural inspection only.
    """
    if delta < 1:
        raise RoundingError("delta must be >= 1")
    fixed_set = frozenset(fixed)
    residual = tuple(
        v for v in range(instance.n_candidates) if v not in fixed_set
    )
    probs = []
    for v in residual:
        raw = (x.x[v] + 1.0 / delta) * 4.0 * math.log(2.0 * math.e * delta * delta)
        if raw >= 1.0 and not allow_saturated:
            raise RoundingError(
                f"candidate {v} has selection probability {raw} >= 1; "
                "the fixed-choice phase is incomplete"
            )
        probs.append(min(1.0, raw))
    residual_set = frozenset(residual)
    threshold = 8.0 * math.log(2.0 * math.e * delta * delta) * (t_star + 1.0)
    perf = []
    for u, row in enumerate(instance.adjacency):
        vs = tuple(v for v in row if v in residual_set)
        if not vs:
            continue
        ws = tuple(float(instance.weights[v]) for v in vs) if weighted else tuple(
            1.0 for _ in vs
        )
        perf.append(PerformanceEvent(agent=u, variables=vs, threshold=threshold, weights=ws))
    groups = tuple(
        residual[i : i + delta] for i in range(0, len(residual), delta)
    )
    feas = []
    for j, grp in enumerate(groups):
        boosted = sum(x.x[v] + 1.0 / delta for v in grp)
        last = j == len(groups) - 1
        if last and boosted < 1.0:
            continue
        feas.append(
            FeasibilityEvent(
                group=j, variables=grp, target=sum(x.x[v] for v in grp)
            )
        )
    system = BadEventSystem(
        variables=residual,
        probs=tuple(probs),
        performance_events=tuple(perf),
        feasibility_events=tuple(feas),
        groups=groups,
        dependency_degree=_dependency_degree(perf, feas),
    )
    # pipeline-built systems always interlock (every residual candidate has a
    # residual agent, and at least one group event exists); saturated builds
    # are structural-inspection only and may be degenerate
    if not allow_saturated and system.events and not (
        1 <= system.dependency_degree <= delta * delta
    ):
        raise RoundingError(
            f"dependency degree {system.dependency_degree} outside [1, {delta * delta}]"
        )
    return system


def _dependency_degree(perf: Sequence[PerformanceEvent],
                       feas: Sequence[FeasibilityEvent]) -> int:
    events = list(perf) + list(feas)
    var_sets = [frozenset(e.variables) for e in events]
    deg = 0
    for i in range(len(events)):
        d = sum(1 for j in range(len(events)) if j != i and var_sets[i] & var_sets[j])
        deg = max(deg, d)
    return deg


def dependency_adjacency(system: BadEventSystem) -> tuple[tuple[int, ...], ...]:
    """Adjacency lists of the dependency graph over ``system.events`` order."""
    events = system.events
    var_sets = [frozenset(e.variables) for e in events]
    return tuple(
        tuple(j for j in range(len(events)) if j != i and var_sets[i] & var_sets[j])
        for i in range(len(events))
    )


def default_resample_budget(system: BadEventSystem) -> int:
    d = max(1, system.dependency_degree)
    return max(1, math.ceil(1000.0 * (1.0 + 1.0 / d) * len(system.events)))


def moser_tardos(
    system: BadEventSystem, rng: int | Rng, max_resamples: int | None = None
) -> dict[int, int]:
    """Sample all variables, then resample the lowest-index occurring event
    until none occurs; returns the final assignment.

    The budget defaults to 1000x the expected resample count; exhausting it
    signals a construction bug and raises with per-event diagnostics.
    """
    gen = make_rng(rng)
    if max_resamples is None:
        max_resamples = default_resample_budget(system)
    assignment = {
        v: int(gen.random() < p) for v, p in zip(system.variables, system.probs)
    }
    events = system.events
    if not events:
        return assignment
    prob = dict(zip(system.variables, system.probs))
    occur_counts = [0] * len(events)
    resamples = 0
    while True:
        hit = None
        for i, ev in enumerate(events):
            if ev.occurs(assignment):
                hit = i
                break
        if hit is None:
            return assignment
        occur_counts[hit] += 1
        resamples += 1
        if resamples > max_resamples:
            worst = sorted(
                range(len(events)), key=lambda i: -occur_counts[i]
            )[:5]
            detail = ", ".join(f"event {i}: {occur_counts[i]} hits" for i in worst)
            raise ResampleBudgetError(
                f"exceeded {max_resamples} resamples; hottest events: {detail}"
            )
        for v in events[hit].variables:
            assignment[v] = int(gen.random() < prob[v])


def lll_rounding(
    instance: Instance,
    x: FractionalSolution,
    rng: int | Rng,
    weighted: bool = False,
    max_resamples: int | None = None,
) -> Selection:
    """Three-phase rounding: fix saturated candidates, resample the rest
    until no bad event occurs, then top up with at most one vertex.

    Weighted mode expects the normalized pipeline output (T* = 1, weights in
    [0, 1]).  The returned selection always meets the demand.
    """
    k = instance.demand
    if weighted:
        if not x.normalized or x.t_star != 1.0:
            raise RoundingError("weighted mode needs a normalized solution (T*=1)")
        if any(w < 0 or w > 1 + FRAC_EPS for w in instance.weights):
            raise RoundingError("weighted mode needs weights in [0, 1]")
    else:
        if any(w != 1 for w in instance.weights):
            raise RoundingError("unweighted mode requires unit weights")
    delta = degree_profile(instance).max_degree
    if delta == 0:
        return as_selection(instance, range(k))
    raws = [
        (x.x[v] + 1.0 / delta) * 4.0 * math.log(2.0 * math.e * delta * delta)
        for v in range(instance.n_candidates)
    ]
    s1 = [v for v, raw in enumerate(raws) if raw >= 1.0]
    if len(s1) >= k:
        return as_selection(instance, s1)
    system = build_bad_events(
        instance, x, x.t_star, delta, weighted=weighted, fixed=s1
    )
    assignment = moser_tardos(system, rng, max_resamples=max_resamples)
    s2 = [v for v in system.variables if assignment[v]]
    if len(s1) + len(s2) >= k:
        return as_selection(instance, s1 + s2)
    if len(s1) + len(s2) < k - 1:
        raise RoundingError(
            f"demand gap {k - len(s1) - len(s2)} > 1 after the local-search phase"
        )
    taken = set(s1) | set(s2)
    extra = next(v for v in range(instance.n_candidates) if v not in taken)
    return as_selection(instance, s1 + s2 + [extra])


# ---------------------------------------------------------------------------
# Trial harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialStats:
    """Aggregated empirical statistics over seeded runs."""

    trials: int
    frequencies: tuple[float, ...]            # per candidate
    joint: np.ndarray                         # m x m pairwise selection rates
    feasibility_rate: float                   # fraction of runs with |S| >= k
    values: tuple[float, ...]                 # per-run max disagreement
    contributions: tuple[float, ...]          # per candidate, w_v * frequency


ALGORITHMS = ("independent", "pipage", "lll")


def run_trials(
    algorithm: str,
    instance: Instance,
    x: FractionalSolution,
    seeds: Sequence[int],
    weighted: bool = False,
) -> TrialStats:
    """Run one algorithm once per seed and aggregate selection statistics."""
    if algorithm not in ALGORITHMS:
        raise RoundingError(f"unknown algorithm {algorithm!r}")
    m = instance.n_candidates
    k = instance.demand
    if algorithm == "pipage":
        x = trim_to_demand(x, k)
    indicators = np.zeros((len(seeds), m), dtype=np.int8)
    values = []
    feas = 0
    for t, seed in enumerate(seeds):
        gen = make_rng(seed)
        if algorithm == "independent":
            sel = independent_rounding(x, instance, gen)
            chosen, value = sel.chosen, sel.value
        elif algorithm == "pipage":
            chosen = pipage_rounding(x, gen)
            value = as_selection(instance, chosen).value
        else:
            sel = lll_rounding(instance, x, gen, weighted=weighted)
            chosen, value = sel.chosen, sel.value
        indicators[t, list(chosen)] = 1
        values.append(float(value))
        if len(chosen) >= k:
            feas += 1
    freqs = indicators.mean(axis=0)
    joint = (indicators.T.astype(np.float64) @ indicators) / max(1, len(seeds))
    contributions = tuple(float(instance.weights[v]) * float(freqs[v]) for v in range(m))
    return TrialStats(
        trials=len(seeds),
        frequencies=tuple(float(f) for f in freqs),
        joint=joint,
        feasibility_rate=feas / max(1, len(seeds)),
        values=tuple(values),
        contributions=contributions,
    )
