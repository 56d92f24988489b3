"""Feasibility LP, threshold search, and the weighted normalization pipeline.

The relaxation guesses a disagreement threshold T and checks feasibility of

    sum_{v in N(u)} w_v * x_v <= T      for every agent u,
    sum_v x_v >= k,
    0 <= x_v <= 1.

The least feasible T is a lower bound on the integral optimum.  Unit-weight
instances binary-search T over the integers 1..k; weighted instances halve T
from the maximum agent load until infeasible (with candidates heavier than T
barred from the support), giving a lower bound within a factor of 2.  The
backend is scipy's HiGHS behind a residual contract: returned points violate
no constraint by more than EPS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .core import Instance, InstanceError

EPS = 1e-9


class LpSolverError(RuntimeError):
    """Numerical failure in the LP backend, with a residual report."""


@dataclass(frozen=True)
class FractionalSolution:
    x: tuple[float, ...]
    t_star: float
    normalized: bool = False

    @property
    def total(self) -> float:
        return float(sum(self.x))


@dataclass(frozen=True)
class NormalizedInstance:
    """Weights divided by T*, candidates heavier than T* cut.

    ``kept[j]`` maps residual candidate j back to the original id; objective
    values on the normalized instance scale back by ``scale``.
    """

    instance: Instance
    kept: tuple[int, ...]
    scale: float

    def map_back(self, chosen) -> tuple[int, ...]:
        return tuple(sorted(self.kept[j] for j in chosen))

    def denormalize_value(self, value: float) -> float:
        return value * self.scale


@dataclass(frozen=True)
class DoublingResult:
    """Either a positive threshold with its witness, or the zero-weight
    shortcut's direct selection (t_star == 0)."""

    t_star: float
    x: FractionalSolution | None
    zero_selection: tuple[int, ...] | None = None


def residuals(instance: Instance, x, t: float) -> dict[str, float]:
    """Constraint violations of a point (all should be <= EPS)."""
    xv = np.asarray(x, dtype=float)
    w = np.asarray(instance.weights, dtype=float)
    agent_violation = 0.0
    for row in instance.adjacency:
        load = float(sum(w[v] * xv[v] for v in row))
        agent_violation = max(agent_violation, load - t)
    return {
        "max_agent_violation": max(0.0, agent_violation),
        "demand_shortfall": max(0.0, instance.demand - float(xv.sum())),
        "box_violation": max(0.0, float(np.max(np.maximum(-xv, xv - 1.0), initial=0.0))),
    }


def check_feasible(
    instance: Instance, t: float, eligible: frozenset[int] | None = None
) -> FractionalSolution | None:
    """Solve the feasibility LP at threshold t; None when infeasible.

    ``eligible`` restricts the support: non-eligible candidates are pinned to
    x_v = 0 (used by the weighted doubling loop).  A returned point always
    satisfies every constraint within EPS; a solver breakdown raises
    LpSolverError with the residual report.
    """
    if t < 0:
        raise InstanceError("threshold must be nonnegative")
    n, m, k = instance.n_agents, instance.n_candidates, instance.demand
    if m == 0:
        return None if k > 0 else FractionalSolution((), float(t))
    w = instance.weights
    rows: list[np.ndarray] = []
    b: list[float] = []
    for row in instance.adjacency:
        if not row:
            continue
        a = np.zeros(m)
        for v in row:
            a[v] = w[v]
        rows.append(a)
        b.append(float(t))
    rows.append(-np.ones(m))
    b.append(-float(k))
    A_ub = np.vstack(rows)
    bounds = [
        (0.0, 1.0 if (eligible is None or v in eligible) else 0.0) for v in range(m)
    ]
    res = linprog(c=np.zeros(m), A_ub=A_ub, b_ub=np.array(b), bounds=bounds,
                  method="highs")
    if res.status == 2:
        return None
    if res.status != 0:
        raise LpSolverError(f"LP backend failure (status {res.status}): {res.message}")
    x = np.clip(res.x, 0.0, 1.0)
    rep = residuals(instance, x, t)
    if max(rep.values()) > EPS:
        raise LpSolverError(f"LP point violates the residual contract: {rep}")
    return FractionalSolution(tuple(float(v) for v in x), float(t))


def guess_tstar_unweighted(instance: Instance) -> FractionalSolution:
    """Minimum integer threshold in [1, k] with a feasible LP (binary search).

    Requires unit weights on a preprocessed instance; the result is a valid
    lower bound on the integral optimum, reached in O(log k) LP solves.
    """
    if any(w != 1 for w in instance.weights):
        raise InstanceError("unweighted threshold search requires unit weights")
    k = instance.demand
    if k < 1:
        raise InstanceError("demand must be >= 1")
    lo, hi = 1, k
    witness: FractionalSolution | None = None
    while lo < hi:
        mid = (lo + hi) // 2
        sol = check_feasible(instance, float(mid))
        if sol is not None:
            witness = sol
            hi = mid
        else:
            lo = mid + 1
    if witness is None or witness.t_star != float(lo):
        witness = check_feasible(instance, float(lo))
    if witness is None:
        raise LpSolverError("threshold k must be feasible on a valid instance")
    return witness


def doubling(instance: Instance) -> DoublingResult:
    """Halve the threshold from the maximum agent load until infeasible.

    Candidates heavier than the current threshold are barred from the LP
    support at every step.  Returns twice the first infeasible threshold
    (i.e. the last feasible one) and its witness; the result is at most
    twice the integral optimum.  When k or more candidates weigh 0 the
    optimum is 0 and that selection is returned directly instead.
    """
    m, k = instance.n_candidates, instance.demand
    if k < 1:
        raise InstanceError("demand must be >= 1")
    w = instance.weights
    zero = [v for v in range(m) if w[v] == 0]
    if len(zero) >= k:
        return DoublingResult(t_star=0.0, x=None, zero_selection=tuple(zero[:k]))
    positives = [float(w[v]) for v in range(m) if w[v] > 0]
    min_pos = min(positives)
    t0 = max(
        (sum(w[v] for v in row) for row in instance.adjacency),
        default=0,
    )
    t = float(t0)
    if t <= 0:
        raise InstanceError("instance not preprocessed: no agent sees any weight")
    last: FractionalSolution | None = None
    while True:
        if t < min_pos / 2:
            # restricted support is the zero-weight candidates only (< k of
            # them), so the LP is infeasible without solving it
            break
        eligible = frozenset(v for v in range(m) if w[v] <= t)
        sol = check_feasible(instance, t, eligible=eligible)
        if sol is None:
            break
        last = sol
        t /= 2.0
    if last is None:
        raise LpSolverError("doubling start threshold must be feasible")
    return DoublingResult(t_star=2.0 * t, x=last, zero_selection=None)


def normalize(
    instance: Instance, t_star: float, x: FractionalSolution
) -> tuple[NormalizedInstance, FractionalSolution]:
    """Cut candidates heavier than T*, divide weights by T*.

    The witness must put (numerically) no mass on cut candidates; the
    returned fractional solution has T* = 1 and weights in [0, 1].
    """
    if t_star <= 0:
        raise InstanceError(
            "normalize needs t_star > 0 (the zero-weight shortcut should have fired)"
        )
    m = instance.n_candidates
    w = instance.weights
    kept = tuple(v for v in range(m) if w[v] <= t_star)
    for v in range(m):
        if w[v] > t_star and x.x[v] > EPS:
            raise InstanceError(f"candidate {v} heavier than T* carries x={x.x[v]}")
    old_to_new = {v: j for j, v in enumerate(kept)}
    adj = tuple(
        tuple(old_to_new[v] for v in row if v in old_to_new)
        for row in instance.adjacency
    )
    new_weights = tuple(min(1.0, float(w[v]) / t_star) for v in kept)
    norm_inst = Instance(
        n_agents=instance.n_agents,
        n_candidates=len(kept),
        adjacency=adj,
        weights=new_weights,
        demand=instance.demand,
    )
    norm_x = FractionalSolution(
        x=tuple(x.x[v] for v in kept), t_star=1.0, normalized=True
    )
    return NormalizedInstance(norm_inst, kept, float(t_star)), norm_x


def trim_to_demand(x: FractionalSolution, k: int) -> FractionalSolution:
    """Reduce coordinates, largest index first, until sum x = k exactly.

    Decreasing any coordinate only loosens the disagreement constraints, so
    feasibility at the same threshold is preserved.
    """
    total = sum(x.x)
    if total < k - EPS:
        raise InstanceError(f"cannot trim: sum x = {total} < k = {k}")
    xs = list(x.x)
    excess = total - k
    for v in range(len(xs) - 1, -1, -1):
        if excess <= 0:
            break
        cut = min(xs[v], excess)
        xs[v] -= cut
        excess -= cut
    # pin the total exactly at k against float drift
    drift = sum(xs) - k
    if xs and abs(drift) > 0:
        for v in range(len(xs) - 1, -1, -1):
            if 0.0 < xs[v] and xs[v] - drift <= 1.0:
                xs[v] -= drift
                break
    return FractionalSolution(x=tuple(xs), t_star=x.t_star, normalized=x.normalized)
