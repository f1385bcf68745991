import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphgeom.errors import GraphInputError
from graphgeom.graph import build_graph, complete_graph, cycle_graph, empty_graph, symmetric_difference_count
from graphgeom.spectral import normalized_adjacency
from graphgeom.stability import (
    CONSTANT_NOTE,
    bound_constant,
    embedding_stability_check,
    operator_norm_delta,
    perturbation_bound,
    power_iteration_norm,
    random_edit,
)
from graphgeom.synth import erdos_renyi

from conftest import graphs


def delta(g1, g2):
    return normalized_adjacency(g2) - normalized_adjacency(g1)


class TestOperatorNorm:
    def test_identical(self):
        g = cycle_graph(5)
        assert operator_norm_delta(g, g) == 0.0

    def test_k2_vs_empty(self):
        assert abs(operator_norm_delta(complete_graph(2), empty_graph(2)) - 1.0) <= 1e-10

    def test_single_edit_matches_svd_oracle(self, rng):
        g1 = erdos_renyi(32, 0.15, seed=21)
        g2 = random_edit(g1, 1, rng)
        oracle = np.linalg.norm(delta(g1, g2), ord=2)
        assert abs(operator_norm_delta(g1, g2) - oracle) <= 1e-8

    def test_power_iteration_fallback(self, rng):
        g1 = erdos_renyi(40, 0.2, seed=2)
        g2 = random_edit(g1, 3, rng)
        assert abs(power_iteration_norm(delta(g1, g2)) - operator_norm_delta(g1, g2)) <= 1e-6

    def test_node_mismatch(self):
        with pytest.raises(GraphInputError):
            operator_norm_delta(empty_graph(2), empty_graph(3))


class TestBound:
    def test_no_edits(self):
        r = perturbation_bound(cycle_graph(4), cycle_graph(4))
        assert r.edit_count == 0 and r.measured == 0.0 == r.bound and r.bound_satisfied

    def test_regular_plug_in(self):
        assert bound_constant(1.0) * 1 / 2 == 1.0

    def test_union_degree_ratio(self):
        # K_2 vs empty: augmented degrees {2,2} and {1,1}; d_min=1, c=2
        r = perturbation_bound(complete_graph(2), empty_graph(2))
        assert r.d_min == 1.0 and r.degree_ratio == 2.0
        assert r.bound == pytest.approx(1 + math.sqrt(2))
        assert r.to_dict()["constant_note"] == CONSTANT_NOTE

    def test_random_single_edits(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            g1 = erdos_renyi(int(rng.integers(2, 40)), float(rng.uniform(0.05, 0.5)), int(rng.integers(1 << 30)))
            r = perturbation_bound(g1, random_edit(g1, 1, rng))
            assert r.bound_satisfied and r.measured >= 0 and r.bound > 0


@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_subadditive_over_single_edits(seed, k):
    rng = np.random.default_rng(seed)
    g = erdos_renyi(int(rng.integers(4, 20)), 0.3, int(rng.integers(1 << 30)))
    chain = [g]
    for _ in range(k):
        chain.append(random_edit(chain[-1], 1, rng))
    total = operator_norm_delta(chain[0], chain[-1])
    steps = [operator_norm_delta(a, b) for a, b in zip(chain, chain[1:])]
    assert total <= sum(steps) + 1e-12
    assert total <= sum(perturbation_bound(a, b).bound for a, b in zip(chain, chain[1:])) + 1e-12


@given(graphs(min_nodes=2, max_nodes=10), graphs(min_nodes=2, max_nodes=10))
def test_symmetry(g1, g2):
    if g1.num_nodes != g2.num_nodes:
        return
    assert abs(operator_norm_delta(g1, g2) - operator_norm_delta(g2, g1)) <= 1e-12


class TestEmbedding:
    def test_same_graph(self):
        g = cycle_graph(6)
        m, b = embedding_stability_check(g, g, [np.eye(6)] * 2, np.eye(6), T=2)
        assert m == 0.0 == b

    def test_c8_single_edit(self):
        g1 = cycle_graph(8)
        g2 = build_graph(8, g1.edges.tolist() + [[0, 4]])
        res = embedding_stability_check(g1, g2, [np.eye(8)] * 2, np.eye(8), T=2)
        assert res.satisfied and res.measured <= res.bound
        oracle = np.linalg.norm(np.linalg.matrix_power(normalized_adjacency(g2), 2)
                                - np.linalg.matrix_power(normalized_adjacency(g1), 2), 2)
        assert abs(res.measured - oracle) <= 1e-12

    def test_homogeneous_in_h0(self, rng):
        g1 = erdos_renyi(12, 0.3, seed=4)
        g2 = random_edit(g1, 2, rng)
        w = [rng.standard_normal((3, 3)) for _ in range(2)]
        h = rng.standard_normal((12, 3))
        m1, b1 = embedding_stability_check(g1, g2, w, h)
        m2, b2 = embedding_stability_check(g1, g2, w, 2.5 * h)
        assert m2 == pytest.approx(2.5 * m1, rel=1e-12) and b2 == pytest.approx(2.5 * b1, rel=1e-12)

    def test_weight_chain_mismatch(self):
        with pytest.raises(GraphInputError):
            embedding_stability_check(cycle_graph(4), cycle_graph(4), [np.ones((2, 2))], np.ones((4, 3)))

    def test_nested_edits_within_bound(self, rng):
        g = erdos_renyi(20, 0.25, seed=3)
        w = [rng.standard_normal((2, 2)) for _ in range(3)]
        h = rng.standard_normal((20, 2))
        cur = g
        for _ in range(5):
            cur = random_edit(cur, 1, rng)
            res = embedding_stability_check(g, cur, w, h, nonlinearity="clamp")
            assert res.satisfied


def test_random_edit_count(rng):
    g = erdos_renyi(10, 0.5, seed=1)
    assert symmetric_difference_count(g, random_edit(g, 4, rng)) == 4
