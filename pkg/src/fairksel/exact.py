"""Exact solvers: brute-force oracle, degree-2 instances, laminar set systems.

Three polynomial special cases are solved exactly:

* unit-weight instances with maximum degree 2 (pick an alternating subset
  per path/cycle component; the optimum is always 1 or 2),
* weighted instances with maximum degree 2 (scan the O(n) candidate
  objective values ascending and decide each one with a red-blue coloring
  feasibility check),
* laminar set systems (tree DP with a per-node children knapsack).

``brute_force_opt`` is the verification oracle used everywhere else; it
enumerates size-k subsets in lexicographic order with monotone pruning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    Instance,
    InstanceError,
    Number,
    Selection,
    as_selection,
    candidate_adjacency,
    candidate_degrees,
    degree_profile,
)

INF = math.inf


class OracleCapError(ValueError):
    """Instance too large for the enumeration oracle."""


class RedBlueError(ValueError):
    """Malformed red-blue component."""


class LaminarError(ValueError):
    """Input set collection is not laminar (or is otherwise unusable)."""


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def brute_force_opt(instance: Instance, exact_k: bool = True, cap: int = 22) -> Selection:
    """Enumerate candidate subsets and return an optimal Selection.

    Only size-k subsets are enumerated: the objective is monotone under
    inclusion, so the optimum over subsets of size >= k is attained at size
    exactly k, making ``exact_k`` immaterial for the value.  Ties go to the
    lexicographically smallest chosen set.  DFS prunes any prefix whose
    running maximum already matches the incumbent, which cannot skip a
    lexicographically earlier optimum because enumeration is in lex order.
    """
    del exact_k  # value identical in both modes; see docstring
    m, k = instance.n_candidates, instance.demand
    if m > cap:
        raise OracleCapError(f"instance too large for oracle (m={m} > cap={cap})")
    if k == 0:
        return Selection(chosen=(), value=0)
    if k > m:
        raise InstanceError(f"demand {k} exceeds candidate count {m}")

    cand_agents = candidate_adjacency(instance)
    weights = instance.weights
    loads: list[Number] = [0] * instance.n_agents

    best_val: Number | None = None
    best_set: tuple[int, ...] = ()
    chosen: list[int] = []

    def rec(start: int, cur_max: Number) -> None:
        nonlocal best_val, best_set
        if best_val is not None and cur_max >= best_val:
            return
        if len(chosen) == k:
            best_val = cur_max
            best_set = tuple(chosen)
            return
        remaining = k - len(chosen)
        for v in range(start, m - remaining + 1):
            new_max = cur_max
            wv = weights[v]
            for u in cand_agents[v]:
                loads[u] += wv
                if loads[u] > new_max:
                    new_max = loads[u]
            chosen.append(v)
            rec(v + 1, new_max)
            chosen.pop()
            for u in cand_agents[v]:
                loads[u] -= wv

    rec(0, 0)
    assert best_val is not None
    return Selection(chosen=best_set, value=best_val)


# ---------------------------------------------------------------------------
# Red-blue coloring on max-degree-2 graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RBVertex:
    """One vertex of a red-blue component.

    White vertices (candidates) may be colored blue; red vertices (agents)
    carry a cap on the number of blue neighbors.
    """

    white: bool
    label: int
    cap: int = 2


@dataclass(frozen=True)
class RBComponent:
    closed: bool  # cycle when True, path otherwise
    vertices: tuple[RBVertex, ...]


@dataclass(frozen=True)
class RedBlueInstance:
    components: tuple[RBComponent, ...]
    demand: int


def _component_count_witnesses(comp: RBComponent) -> dict[int, tuple[int, ...]]:
    """Achievable blue counts for one component, with one witness each.

    DP over the vertex sequence with state (previous blue?, current blue?);
    a red vertex's cap is checked once both its neighbors are decided.
    """
    vs = comp.vertices
    t = len(vs)
    if t == 0:
        raise RedBlueError("empty component")
    if comp.closed and t < 3:
        raise RedBlueError("cycle component needs at least 3 vertices")

    def colors(v: RBVertex) -> tuple[int, ...]:
        return (0, 1) if v.white else (0,)

    out: dict[int, tuple[int, ...]] = {}

    def harvest(count: int, witness: tuple[int, ...]) -> None:
        if count not in out:
            out[count] = tuple(sorted(witness))

    if not comp.closed:
        # states: (b_prev, b_cur) -> {count: witness}; virtual non-blue v[-1]
        states: dict[tuple[int, int], dict[int, tuple[int, ...]]] = {}
        for b0 in colors(vs[0]):
            w0 = (vs[0].label,) if b0 else ()
            states.setdefault((0, b0), {})[b0] = w0
        for j in range(1, t):
            new: dict[tuple[int, int], dict[int, tuple[int, ...]]] = {}
            for (b_prev, b_cur), counts in states.items():
                for b_next in colors(vs[j]):
                    if not vs[j - 1].white and b_prev + b_next > vs[j - 1].cap:
                        continue
                    slot = new.setdefault((b_cur, b_next), {})
                    for c, wit in counts.items():
                        slot.setdefault(c + b_next, wit + ((vs[j].label,) if b_next else ()))
            states = new
        for (b_prev, b_cur), counts in states.items():
            if not vs[-1].white and b_prev > vs[-1].cap:
                continue
            for c, wit in counts.items():
                harvest(c, wit)
        return out

    # cycle: fix the first two colors, then close the loop with both wrap checks
    for b0 in colors(vs[0]):
        for b1 in colors(vs[1]):
            w01 = tuple(
                v.label for v, b in ((vs[0], b0), (vs[1], b1)) if b
            )
            states = {(b0, b1): {b0 + b1: w01}}
            for j in range(2, t):
                new = {}
                for (b_prev, b_cur), counts in states.items():
                    for b_next in colors(vs[j]):
                        if not vs[j - 1].white and b_prev + b_next > vs[j - 1].cap:
                            continue
                        slot = new.setdefault((b_cur, b_next), {})
                        for c, wit in counts.items():
                            slot.setdefault(
                                c + b_next, wit + ((vs[j].label,) if b_next else ())
                            )
                states = new
            for (b_prev, b_cur), counts in states.items():
                if not vs[-1].white and b_prev + b0 > vs[-1].cap:
                    continue
                if not vs[0].white and b1 + b_cur > vs[0].cap:
                    continue
                for c, wit in counts.items():
                    harvest(c, wit)
    return out


def red_blue(rb: RedBlueInstance) -> tuple[int, ...] | None:
    """Decide whether exactly ``demand`` whites can be colored blue.

    Returns the sorted labels of one feasible coloring, or None.  Per
    component a position DP yields the achievable blue-count set; a boolean
    knapsack over components then hits the demand exactly.  Components with
    no red vertices accept every count up to their white count.
    """
    per_comp = [_component_count_witnesses(c) for c in rb.components]
    reach: dict[int, tuple[int, ...]] = {0: ()}
    for counts in per_comp:
        new: dict[int, tuple[int, ...]] = {}
        for base, wit in reach.items():
            for c, cwit in counts.items():
                new.setdefault(base + c, wit + cwit)
        reach = new
    if rb.demand not in reach:
        return None
    return tuple(sorted(reach[rb.demand]))


def _decompose_components(
    instance: Instance, eligible: frozenset[int], caps: Sequence[int]
) -> tuple[RBComponent, ...]:
    """Split the bipartite graph (restricted to eligible candidates) into
    alternating path/cycle components of RBVertex nodes."""
    # nodes: ("L", agent) and ("R", candidate); sort key keeps traversal stable
    adj: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for u, row in enumerate(instance.adjacency):
        for v in row:
            if v not in eligible:
                continue
            adj.setdefault(("L", u), []).append(("R", v))
            adj.setdefault(("R", v), []).append(("L", u))
    for u in range(instance.n_agents):
        adj.setdefault(("L", u), [])
    for v in eligible:
        adj.setdefault(("R", v), [])
    for node, nbrs in adj.items():
        if len(nbrs) > 2:
            raise RedBlueError(f"vertex {node} has degree {len(nbrs)} > 2")
        nbrs.sort()

    def vert(node: tuple[str, int]) -> RBVertex:
        side, idx = node
        if side == "R":
            return RBVertex(white=True, label=idx)
        return RBVertex(white=False, label=idx, cap=caps[idx])

    seen: set[tuple[str, int]] = set()
    comps: list[RBComponent] = []
    for start in sorted(adj):
        if start in seen:
            continue
        # find a path endpoint if one exists in this component
        comp_nodes = []
        stack = [start]
        visited = {start}
        while stack:
            node = stack.pop()
            comp_nodes.append(node)
            for nb in adj[node]:
                if nb not in visited:
                    visited.add(nb)
                    stack.append(nb)
        seen |= visited
        endpoints = sorted(n for n in visited if len(adj[n]) <= 1)
        if endpoints:
            order = [endpoints[0]]
        else:
            first = min(visited)
            order = [first]
        prev = None
        while True:
            cur = order[-1]
            nxt = [n for n in adj[cur] if n != prev]
            if not nxt:
                break
            nxt.sort()
            step = nxt[0]
            if step == order[0] and len(order) > 1:
                break  # cycle closed
            prev = cur
            order.append(step)
            if len(order) > len(visited):
                raise RedBlueError("component walk did not terminate")
        closed = not endpoints
        if len(order) != len(visited):
            raise RedBlueError("component is not a single path or cycle")
        comps.append(RBComponent(closed=closed, vertices=tuple(vert(n) for n in order)))
    return tuple(comps)


# ---------------------------------------------------------------------------
# Maximum-degree-2 solvers
# ---------------------------------------------------------------------------

def _require_delta2(instance: Instance) -> None:
    prof = degree_profile(instance)
    if prof.max_degree > 2:
        raise InstanceError(f"max degree {prof.max_degree} > 2")


def max_vertex_set(instance: Instance) -> tuple[int, ...]:
    """Largest candidate set keeping every agent's disagreement at most 1.

    Requires unit weights and maximum degree 2.  Per component the candidates
    are indexed 1..l along the path/cycle and the odd indices are taken,
    dropping the last one on an odd cycle so the wrap-around pair never
    shares an agent.  Sizes: ceil(l/2) per path, floor(l/2) per cycle.
    """
    _require_delta2(instance)
    if any(w != 1 for w in instance.weights):
        raise InstanceError("max_vertex_set requires unit weights")
    eligible = frozenset(range(instance.n_candidates))
    caps = [2] * instance.n_agents
    chosen: list[int] = []
    for comp in _decompose_components(instance, eligible, caps):
        rs = [v.label for v in comp.vertices if v.white]
        ell = len(rs)
        if ell == 0:
            continue
        if not comp.closed:
            chosen.extend(rs[0::2])
        elif ell % 2 == 0:
            chosen.extend(rs[0::2])
        else:
            chosen.extend(rs[0 : ell - 1 : 2])
    return tuple(sorted(chosen))


def solve_delta2_unweighted(instance: Instance) -> Selection:
    """Optimal solver for unit weights and max degree 2 (preprocessed input).

    The optimum is 1 when the disagreement-1 set of ``max_vertex_set`` can
    cover the demand, and 2 otherwise (every agent has at most two unit
    neighbors, so no selection exceeds 2).
    """
    _require_delta2(instance)
    if any(w != 1 for w in instance.weights):
        raise InstanceError("unweighted solver requires unit weights")
    if any(d == 0 for d in candidate_degrees(instance)):
        raise InstanceError("instance not preprocessed: isolated candidate")
    k = instance.demand
    if k < 1 or k > instance.n_candidates:
        raise InstanceError("demand out of range")
    mvs = max_vertex_set(instance)
    if len(mvs) >= k:
        return as_selection(instance, mvs[:k])
    return as_selection(instance, range(k))


def solve_delta2_weighted(instance: Instance) -> Selection:
    """Optimal solver for weighted instances with max degree 2 (preprocessed).

    The optimum lies in B, the union over agents of the at-most-4 possible
    disagreement values.  Each b in B ascending is decided by a red-blue
    feasibility check: candidates heavier than b cannot be selected at value
    b (each has a neighbor), so they are dropped from the white set, after
    which a per-agent cap on the *number* of blue neighbors is exact:
    cap 2 when both neighbors together fit under b, else cap 1 when the
    lighter single neighbor fits, else cap 0 (degree-1 agents analogously).
    """
    _require_delta2(instance)
    if any(d == 0 for d in candidate_degrees(instance)):
        raise InstanceError("instance not preprocessed: isolated candidate")
    k = instance.demand
    if k < 1 or k > instance.n_candidates:
        raise InstanceError("demand out of range")
    w = instance.weights
    for b in candidate_values(instance):
        eligible = frozenset(v for v in range(instance.n_candidates) if w[v] <= b)
        if len(eligible) < k:
            continue
        caps = []
        for row in instance.adjacency:
            if len(row) == 0:
                caps.append(2)
            elif len(row) == 1:
                caps.append(1 if b >= w[row[0]] else 0)
            else:
                p, q = row
                if b >= w[p] + w[q]:
                    caps.append(2)
                elif b >= min(w[p], w[q]):
                    caps.append(1)
                else:
                    caps.append(0)
        comps = _decompose_components(instance, eligible, caps)
        witness = red_blue(RedBlueInstance(components=comps, demand=k))
        if witness is not None:
            return as_selection(instance, witness)
    raise InstanceError("no feasible value found; instance invariants violated")


def candidate_values(instance: Instance) -> tuple[Number, ...]:
    """Sorted candidate optimal values: 0 plus every per-agent sum option."""
    vals: set[Number] = {0}
    w = instance.weights
    for row in instance.adjacency:
        if len(row) == 1:
            vals.add(w[row[0]])
        elif len(row) == 2:
            p, q = row
            vals.update((w[p], w[q], w[p] + w[q]))
        elif len(row) > 2:
            raise InstanceError("candidate_values requires max agent degree 2")
    return tuple(sorted(vals))


# ---------------------------------------------------------------------------
# Laminar set systems
# ---------------------------------------------------------------------------

def detect_laminar(sets: Sequence[Iterable[int]]) -> bool:
    """True iff every pair of sets is nested (properly) or disjoint."""
    fs = [frozenset(s) for s in sets]
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            a, b = fs[i], fs[j]
            if a < b or b < a or not (a & b):
                continue
            return False
    return True


@dataclass
class LaminarNode:
    elements: frozenset[int]
    weight: Number           # math.inf marks a padding node
    dummy: bool
    set_index: int | None    # position in the input collection, None for padding
    children: list["LaminarNode"]


@dataclass
class LaminarTree:
    root: LaminarNode
    nodes: list[LaminarNode]  # all nodes, root first

    @property
    def n_real(self) -> int:
        return sum(1 for nd in self.nodes if not nd.dummy)


def build_laminar_tree(
    sets: Sequence[Iterable[int]],
    weights: Sequence[Number],
    ground: Iterable[int],
) -> LaminarTree:
    """Arrange a laminar family as a rooted tree over the ground set.

    Missing structure is padded: the ground set becomes the root if absent
    and a singleton leaf is added per element whose singleton is absent.
    Padding nodes carry weight +inf so no optimization step can select them.
    Parents are the minimal proper supersets within the padded family.
    """
    universe = frozenset(ground)
    fsets = [frozenset(s) for s in sets]
    for j, s in enumerate(fsets):
        if not s:
            raise LaminarError(f"set {j} is empty")
        if not s <= universe:
            raise LaminarError(f"set {j} not contained in the ground set")
    if not detect_laminar(fsets):
        raise LaminarError("collection is not laminar")
    if len(weights) != len(fsets):
        raise LaminarError("weights length does not match sets")

    nodes: list[LaminarNode] = [
        LaminarNode(s, weights[j], False, j, []) for j, s in enumerate(fsets)
    ]
    have = {s for s in fsets}
    if universe not in have:
        nodes.append(LaminarNode(universe, INF, True, None, []))
        have.add(universe)
    for e in sorted(universe):
        single = frozenset((e,))
        if single not in have:
            nodes.append(LaminarNode(single, INF, True, None, []))
            have.add(single)

    # minimal proper superset = parent; sort big-to-small so ties cannot occur
    by_size = sorted(nodes, key=lambda nd: (-len(nd.elements), sorted(nd.elements)))
    root = by_size[0]
    for nd in by_size[1:]:
        parent = None
        for cand in by_size:
            if cand is nd:
                continue
            if nd.elements < cand.elements:
                if parent is None or len(cand.elements) < len(parent.elements):
                    parent = cand
        assert parent is not None  # universe contains everything
        parent.children.append(nd)
    for nd in nodes:
        nd.children.sort(key=lambda c: min(c.elements))

    order: list[LaminarNode] = []
    stack = [root]
    while stack:
        nd = stack.pop()
        order.append(nd)
        stack.extend(reversed(nd.children))
    return LaminarTree(root=root, nodes=order)


def laminar_dp(tree: LaminarTree, k: int) -> Selection:
    """Exact optimum for node selection on the laminar tree.

    D(u, x) is the least achievable maximum leaf disagreement inside u's
    subtree with exactly x nodes selected there.  Children budgets are
    combined by a max-combine knapsack (sequential pairwise merges), then
    D(u, x) = min(M(u, x), w_u + M(u, x - 1)).  Padded nodes price at +inf
    and are never selected.  Returns the selected original set indices and
    the objective D(root, k), which equals the element-wise maximum
    disagreement of the original laminar instance.
    """
    if k < 0 or k > tree.n_real:
        raise LaminarError(f"demand {k} exceeds selectable set count {tree.n_real}")
    if k == 0:
        return Selection(chosen=(), value=0)

    table: dict[int, list[Number]] = {}
    merge_splits: dict[int, list[list[tuple[int, int] | None]]] = {}
    take: dict[int, list[bool]] = {}

    def solve(node: LaminarNode) -> list[Number]:
        for ch in node.children:
            solve(ch)
        M: list[Number] = [0] + [INF] * k
        splits_here: list[list[tuple[int, int] | None]] = []
        for ch in node.children:
            child = table[id(ch)]
            merged: list[Number] = [INF] * (k + 1)
            split: list[tuple[int, int] | None] = [None] * (k + 1)
            for x in range(k + 1):
                best: Number = INF
                arg: tuple[int, int] | None = None
                for a in range(x + 1):
                    if M[a] == INF:
                        continue
                    b = x - a
                    val = M[a] if M[a] >= child[b] else child[b]
                    if val < best:
                        best = val
                        arg = (a, b)
                merged[x] = best
                split[x] = arg
            M = merged
            splits_here.append(split)
        D: list[Number] = [INF] * (k + 1)
        tk = [False] * (k + 1)
        for x in range(k + 1):
            skip_val = M[x]
            take_val = node.weight + M[x - 1] if x >= 1 and M[x - 1] != INF else INF
            if take_val < skip_val:
                D[x] = take_val
                tk[x] = True
            else:
                D[x] = skip_val
        table[id(node)] = D
        merge_splits[id(node)] = splits_here
        take[id(node)] = tk
        return D

    solve(tree.root)
    value = table[id(tree.root)][k]
    if value == INF:
        raise LaminarError("demand not realizable without padded nodes")

    chosen: list[int] = []

    def extract(node: LaminarNode, x: int) -> None:
        if x == 0:
            return
        budget = x
        if take[id(node)][x]:
            assert node.set_index is not None
            chosen.append(node.set_index)
            budget -= 1
        splits_here = merge_splits[id(node)]
        alloc = [0] * len(node.children)
        rem = budget
        for idx in range(len(node.children) - 1, -1, -1):
            sp = splits_here[idx][rem]
            assert sp is not None
            a, b = sp
            alloc[idx] = b
            rem = a
        assert rem == 0
        for ch, b in zip(node.children, alloc):
            if b:
                extract(ch, b)

    extract(tree.root, k)
    assert len(chosen) == k
    return Selection(chosen=tuple(sorted(chosen)), value=value)


def solve_laminar(
    instance: Instance,
    sets: Sequence[Iterable[int]],
) -> Selection:
    """End-to-end laminar solve on the bipartite-equivalent instance.

    Empty sets are isolated candidates: they are split off first (reducing
    the demand) and re-added to the final selection for free.
    """
    fsets = [frozenset(s) for s in sets]
    if len(fsets) != instance.n_candidates:
        raise LaminarError("sets length does not match candidate count")
    empty = [j for j, s in enumerate(fsets) if not s]
    nonempty = [j for j, s in enumerate(fsets) if s]
    k = instance.demand - len(empty)
    if k <= 0:
        # enough free (empty) sets to meet the demand on their own
        return as_selection(instance, empty)
    sub_sets = [fsets[j] for j in nonempty]
    sub_weights = [instance.weights[j] for j in nonempty]
    if not detect_laminar(sub_sets):
        raise LaminarError("collection is not laminar")
    tree = build_laminar_tree(sub_sets, sub_weights, range(instance.n_agents))
    if k > tree.n_real:
        raise LaminarError("demand exceeds set count")
    sel = laminar_dp(tree, k)
    chosen = [nonempty[j] for j in sel.chosen] + empty
    return as_selection(instance, chosen)
