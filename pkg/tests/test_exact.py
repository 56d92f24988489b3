import dataclasses
import itertools

import numpy as np
import pytest

import fairksel as fk
from fairksel.core import InstanceError
from fairksel.exact import (
    LaminarError,
    OracleCapError,
    RBComponent,
    RBVertex,
    RedBlueError,
    RedBlueInstance,
    _decompose_components,
    red_blue,
)


def with_k(inst, k):
    return dataclasses.replace(inst, demand=k)


class TestOracle:
    def test_matching_k1(self):
        matching = fk.make_instance([[0], [1], [2]], 3, 1)
        sel = fk.brute_force_opt(matching)
        assert sel.value == 1
        assert sel.chosen == (0,)  # lexicographic tie-break

    def test_gap2(self):
        assert fk.brute_force_opt(fk.gen_gap_instance(2)).value == 2

    def test_star_every_pair_hits_twice(self):
        star = fk.make_instance([[0, 1, 2]], 3, 2)
        assert fk.brute_force_opt(star).value == 2

    def test_cap(self):
        big = fk.make_instance([[0]], 30, 1)
        with pytest.raises(OracleCapError):
            fk.brute_force_opt(big)

    def test_exact_k_flag_same_value(self):
        inst = fk.gen_random_bipartite(5, 7, 3, 3, seed=1)
        assert fk.brute_force_opt(inst, exact_k=True).value == \
            fk.brute_force_opt(inst, exact_k=False).value

    def test_value_is_recomputable(self):
        inst = fk.gen_random_bipartite(6, 8, 3, 4, weight_range=(0.5, 3.0), seed=2)
        sel = fk.brute_force_opt(inst)
        assert sel.value == fk.max_disagreement(inst, sel.chosen)


class TestMaxVertexSet:
    @pytest.mark.parametrize("kind,ell,size", [
        ("path", 3, 2),   # odd path: ceil(l/2)
        ("path", 4, 2),   # even path: l/2
        ("path", 1, 1),   # single candidate
        ("cycle", 2, 1),  # even cycle: l/2
        ("cycle", 3, 1),  # odd cycle: floor(l/2)
        ("cycle", 4, 2),
        ("cycle", 5, 2),
    ])
    def test_component_sizes(self, kind, ell, size):
        inst = fk.gen_path_cycle([(kind, ell)], k=1)
        mvs = fk.max_vertex_set(inst)
        assert len(mvs) == size
        assert fk.max_disagreement(inst, mvs) <= 1

    def test_single_edge(self):
        edge = fk.make_instance([[0]], 1, 1)
        assert fk.max_vertex_set(edge) == (0,)

    def test_matches_brute_force_maximum(self):
        rng = np.random.Generator(np.random.PCG64(5))
        for i in range(60):
            n = int(rng.integers(1, 7))
            m = min(int(rng.integers(1, 9)), 2 * n)
            inst = fk.gen_random_bipartite(n, m, 2, 1, seed=100 + i)
            mvs = fk.max_vertex_set(inst)
            assert fk.max_disagreement(inst, mvs) <= 1
            best = 0
            for r in range(m, 0, -1):
                if any(fk.max_disagreement(inst, sub) <= 1
                       for sub in itertools.combinations(range(m), r)):
                    best = r
                    break
            assert len(mvs) == best

    def test_rejects_degree_3(self):
        inst = fk.make_instance([[0, 1, 2]], 3, 1)
        with pytest.raises(InstanceError):
            fk.max_vertex_set(inst)


class TestDelta2Unweighted:
    @pytest.mark.parametrize("ell,k,value", [(3, 2, 1), (3, 3, 2)])
    def test_path3(self, ell, k, value):
        inst = fk.gen_path_cycle([("path", ell)], k=k)
        assert fk.solve_delta2_unweighted(inst).value == value

    def test_cycle2_k1(self):
        inst = fk.gen_path_cycle([("cycle", 2)], k=1)
        assert fk.solve_delta2_unweighted(inst).value == 1

    def test_value_in_one_two_and_matches_oracle(self):
        rng = np.random.Generator(np.random.PCG64(6))
        for i in range(80):
            n = int(rng.integers(2, 8))
            m = min(int(rng.integers(1, 11)), 2 * n)
            inst = fk.gen_random_bipartite(n, m, 2, 1, seed=200 + i)
            for k in range(1, m + 1):
                sel = fk.solve_delta2_unweighted(with_k(inst, k))
                assert sel.value in (1, 2)
                assert sel.value == fk.brute_force_opt(with_k(inst, k)).value
                assert len(sel.chosen) == k


class TestRedBlue:
    def path_rb(self, cap, k):
        # white - red - white path
        comp = RBComponent(closed=False, vertices=(
            RBVertex(white=True, label=0),
            RBVertex(white=False, label=0, cap=cap),
            RBVertex(white=True, label=1),
        ))
        return RedBlueInstance(components=(comp,), demand=k)

    def test_single_red_cap1(self):
        assert red_blue(self.path_rb(cap=1, k=1)) is not None

    def test_cap1_demand2_infeasible(self):
        assert red_blue(self.path_rb(cap=1, k=2)) is None

    def test_knapsack_over_components(self):
        comp = RBComponent(closed=False, vertices=(
            RBVertex(white=True, label=0),
            RBVertex(white=False, label=0, cap=1),
            RBVertex(white=True, label=1),
        ))
        comp2 = RBComponent(closed=False, vertices=(
            RBVertex(white=True, label=2),
            RBVertex(white=False, label=1, cap=1),
            RBVertex(white=True, label=3),
        ))
        # each component allows counts {0, 1}: cap 1 forbids both ends at once
        rb = RedBlueInstance(components=(comp, comp2), demand=2)
        witness = red_blue(rb)
        assert witness is not None and len(witness) == 2
        assert red_blue(RedBlueInstance((comp, comp2), 3)) is None

    def test_no_red_component_accepts_any_count(self):
        comp = RBComponent(closed=False, vertices=(
            RBVertex(white=True, label=0),
        ))
        assert red_blue(RedBlueInstance((comp,), 1)) == (0,)
        assert red_blue(RedBlueInstance((comp,), 2)) is None

    def test_malformed_cycle(self):
        comp = RBComponent(closed=True, vertices=(
            RBVertex(white=True, label=0),
            RBVertex(white=False, label=0, cap=1),
        ))
        with pytest.raises(RedBlueError):
            red_blue(RedBlueInstance((comp,), 1))

    def test_matches_exhaustive_enumeration(self):
        rng = np.random.Generator(np.random.PCG64(7))
        for i in range(120):
            n = int(rng.integers(1, 6))
            m = min(int(rng.integers(1, 9)), 2 * n)
            inst = fk.gen_random_bipartite(n, m, 2, 1, seed=300 + i)
            caps = [int(rng.integers(0, 3)) for _ in range(n)]
            eligible = frozenset(v for v in range(m) if rng.random() < 0.8)
            for k in range(0, len(eligible) + 1):
                comps = _decompose_components(inst, eligible, caps)
                wit = red_blue(RedBlueInstance(comps, k))
                feasible = any(
                    all(sum(1 for v in row if v in set(sub)) <= caps[u]
                        for u, row in enumerate(inst.adjacency))
                    for sub in itertools.combinations(sorted(eligible), k)
                )
                assert (wit is not None) == feasible
                if wit is not None:
                    assert len(set(wit)) == k and set(wit) <= eligible
                    for u, row in enumerate(inst.adjacency):
                        assert sum(1 for v in row if v in set(wit)) <= caps[u]


class TestDelta2Weighted:
    def test_two_neighbors_k1(self):
        inst = fk.make_instance([[0, 1]], 2, 1, weights=[3, 5])
        sel = fk.solve_delta2_weighted(inst)
        assert sel.value == 3 and sel.chosen == (0,)

    def test_two_neighbors_k2_forced(self):
        inst = fk.make_instance([[0, 1]], 2, 2, weights=[3, 5])
        assert fk.solve_delta2_weighted(inst).value == 8

    def test_matching_weights(self):
        inst = fk.make_instance([[0], [1]], 2, 1, weights=[2, 7])
        assert fk.solve_delta2_weighted(inst).value == 2

    def test_heavy_vertex_cannot_sneak_under_low_threshold(self):
        # both k=2 choices must include a weight-9 candidate: optimum is 9,
        # not the smallest per-agent value
        inst = fk.make_instance([[0, 1], [0, 2]], 3, 2, weights=[1, 9, 9])
        sel = fk.solve_delta2_weighted(inst)
        assert sel.value == 9
        assert sel.value == fk.max_disagreement(inst, sel.chosen)

    def test_matches_oracle_integer_weights_exactly(self):
        rng = np.random.Generator(np.random.PCG64(8))
        for i in range(80):
            n = int(rng.integers(2, 8))
            m = min(int(rng.integers(1, 11)), 2 * n)
            inst = fk.gen_random_bipartite(n, m, 2, 1, weight_range=(0, 9),
                                           seed=400 + i, integer_weights=True)
            for k in range(1, m + 1):
                got = fk.solve_delta2_weighted(with_k(inst, k)).value
                assert got == fk.brute_force_opt(with_k(inst, k)).value

    def test_all_zero_weights(self):
        inst = fk.make_instance([[0, 1], [1]], 2, 1, weights=[0, 0])
        assert fk.solve_delta2_weighted(inst).value == 0

    def test_demand_equals_candidate_count(self):
        inst = fk.gen_random_bipartite(4, 6, 2, 6, seed=0)
        assert fk.solve_delta2_unweighted(inst).value == \
            fk.brute_force_opt(inst).value

    def test_matches_oracle_float_weights(self):
        rng = np.random.Generator(np.random.PCG64(9))
        for i in range(40):
            n = int(rng.integers(2, 8))
            m = min(int(rng.integers(1, 11)), 2 * n)
            inst = fk.gen_random_bipartite(n, m, 2, 1, weight_range=(0.1, 5.0),
                                           seed=500 + i)
            for k in range(1, m + 1):
                got = fk.solve_delta2_weighted(with_k(inst, k)).value
                want = fk.brute_force_opt(with_k(inst, k)).value
                assert got == pytest.approx(want, rel=1e-9)


class TestCandidateValues:
    def test_contains_zero_and_sorted(self):
        inst = fk.make_instance([[0, 1], [1]], 2, 1, weights=[3, 5])
        vals = fk.candidate_values(inst)
        assert vals[0] == 0
        assert list(vals) == sorted(vals)
        assert set(vals) == {0, 3, 5, 8}

    def test_size_bound(self):
        inst = fk.gen_random_bipartite(6, 10, 2, 1, weight_range=(0.1, 5.0), seed=3)
        assert len(fk.candidate_values(inst)) <= 4 * inst.n_agents + 1


LAMINAR_FAMILY = [(0, 1), (0, 1, 2, 3, 4), (3, 4), (5, 6), (0,)]


class TestDetectLaminar:
    def test_nested_and_disjoint(self):
        assert fk.detect_laminar(LAMINAR_FAMILY)

    def test_crossing_pair(self):
        assert not fk.detect_laminar([(1, 2), (2, 3)])

    def test_disjoint_singletons(self):
        assert fk.detect_laminar([(0,), (1,), (2,)])

    def test_duplicates_are_not_laminar(self):
        assert not fk.detect_laminar([(0, 1), (0, 1)])


class TestBuildLaminarTree:
    def test_padding_to_root_and_singletons(self):
        tree = fk.build_laminar_tree(LAMINAR_FAMILY, [1] * len(LAMINAR_FAMILY),
                                     ground=range(7))
        assert tree.root.elements == frozenset(range(7))
        leaves = [nd for nd in tree.nodes if not nd.children]
        assert all(len(nd.elements) == 1 for nd in leaves)
        assert len(leaves) == 7
        assert tree.n_real == len(LAMINAR_FAMILY)

    def test_no_padding_needed(self):
        sets = [(0, 1), (0,), (1,)]
        tree = fk.build_laminar_tree(sets, [1, 1, 1], ground=range(2))
        assert all(not nd.dummy for nd in tree.nodes)

    def test_empty_collection_pure_padding(self):
        tree = fk.build_laminar_tree([], [], ground=range(2))
        assert all(nd.dummy for nd in tree.nodes)
        assert len(tree.nodes) == 3  # root plus two singleton leaves

    def test_non_laminar_rejected(self):
        with pytest.raises(LaminarError):
            fk.build_laminar_tree([(0, 1), (1, 2)], [1, 1], ground=range(3))

    def test_children_partition_parent(self):
        tree = fk.build_laminar_tree(LAMINAR_FAMILY, [1] * len(LAMINAR_FAMILY),
                                     ground=range(7))
        for nd in tree.nodes:
            if nd.children:
                union = frozenset().union(*(c.elements for c in nd.children))
                assert union == nd.elements
                total = sum(len(c.elements) for c in nd.children)
                assert total == len(nd.elements)


class TestLaminarDP:
    def test_forced_single(self):
        tree = fk.build_laminar_tree([(0,)], [5], ground=range(1))
        sel = fk.laminar_dp(tree, 1)
        assert sel.value == 5 and sel.chosen == (0,)

    def test_nested_pair(self):
        tree = fk.build_laminar_tree([(0, 1), (0,)], [1, 1], ground=range(2))
        assert fk.laminar_dp(tree, 2).value == 2

    def test_two_disjoint_sets_value_one(self):
        tree = fk.build_laminar_tree(LAMINAR_FAMILY, [1] * len(LAMINAR_FAMILY),
                                     ground=range(7))
        assert fk.laminar_dp(tree, 2).value == 1

    def test_demand_too_large(self):
        tree = fk.build_laminar_tree([(0,)], [5], ground=range(1))
        with pytest.raises(LaminarError):
            fk.laminar_dp(tree, 2)

    def test_cross_check_oracle(self):
        rng = np.random.Generator(np.random.PCG64(10))
        for i in range(60):
            ne = int(rng.integers(1, 9))
            ns = int(rng.integers(1, min(12, 2 * ne - 1) + 1))
            sets, weights = fk.gen_random_laminar(ne, ns, weight_range=(0, 9),
                                                  seed=600 + i, integer_weights=True)
            base = fk.instance_from_sets(ne, sets, 1, weights)
            for k in range(1, ns + 1):
                got = fk.solve_laminar(with_k(base, k), sets)
                want = fk.brute_force_opt(with_k(base, k))
                assert got.value == want.value
                assert got.value == fk.max_disagreement(with_k(base, k), got.chosen)

    def test_empty_sets_are_free(self):
        sets = [(), (0, 1), (1,)]
        inst = fk.instance_from_sets(2, sets, 2, weights=[4, 3, 2])
        sel = fk.solve_laminar(inst, sets)
        assert len(sel.chosen) >= 2
        assert sel.value == fk.brute_force_opt(inst).value
