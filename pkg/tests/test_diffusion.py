import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from graphgeom.curvature import EdgeScoreMap, forman_curvature
from graphgeom.diffusion import (
    WeightingConfig,
    cross_class_mixing,
    curvature_kernel,
    edge_weights,
    gcn_kernel,
    independent_copy_covariance,
    node_covariance_report,
    node_cross_class_mass,
    ridge_readout,
    score_kernel,
)
from graphgeom.errors import ConfigurationError, GraphInputError
from graphgeom.graph import build_graph, complete_graph, path_graph, star_graph
from graphgeom.synth import erdos_renyi

from conftest import labeled_graphs


class TestGcnKernel:
    def test_k2(self):
        np.testing.assert_array_equal(gcn_kernel(complete_graph(2)).matrix, [[0, 1], [1, 0]])

    def test_star_center(self):
        np.testing.assert_allclose(gcn_kernel(star_graph(3)).matrix[0], [0, 1 / 3, 1 / 3, 1 / 3])

    def test_isolated_absorbing(self):
        k = gcn_kernel(build_graph(3, [(0, 1)]))
        assert k.matrix[2].tolist() == [0, 0, 1]

    def test_rows_stochastic(self):
        k = gcn_kernel(erdos_renyi(40, 0.1, seed=5))
        assert np.max(np.abs(k.matrix.sum(axis=1) - 1)) <= 1e-12


class TestCurvatureKernel:
    def test_constant_scores_equal_baseline(self):
        g = erdos_renyi(20, 0.3, seed=3)
        q = score_kernel(g, np.full(g.num_edges, 2.5))
        np.testing.assert_array_equal(q.matrix, gcn_kernel(g).matrix)

    def test_zero_score_neighbor(self):
        g = path_graph(3)
        q = score_kernel(g, [1.0, 0.0])
        assert q.matrix[1].tolist() == [1.0, 0.0, 0.0]

    def test_fallback_row_flagged(self):
        g = path_graph(3)
        q = score_kernel(g, [0.0, 1.0])
        assert q.fallback_rows.tolist() == [True, False, False]
        assert q.matrix[0].tolist() == [0.0, 1.0, 0.0]

    def test_six_node_exp_formula(self):
        g = build_graph(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)])
        f = forman_curvature(g).scores
        fhat = (f - f.mean()) / f.std()
        s = dict(zip(map(tuple, g.edges.tolist()), np.exp(fhat)))
        d = g.degree_array
        q = curvature_kernel(g, forman_curvature(g), WeightingConfig("exp", 1.0)).matrix
        for i in range(6):
            nb = g.neighbors[i]
            raw = {j: s[(min(i, j), max(i, j))] / math.sqrt(d[i] * d[j]) for j in nb}
            z = sum(raw.values())
            for j in range(6):
                assert abs(q[i, j] - raw.get(j, 0.0) / z) <= 1e-14

    def test_scale_invariance(self, rng):
        g = erdos_renyi(15, 0.4, seed=9)
        s = rng.random(g.num_edges) + 0.1
        np.testing.assert_allclose(score_kernel(g, s).matrix, score_kernel(g, 7.0 * s).matrix, atol=1e-15)

    def test_negative_scores_rejected(self):
        with pytest.raises(GraphInputError):
            score_kernel(path_graph(3), [1.0, -1.0])

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError):
            WeightingConfig("cubic")


@pytest.mark.parametrize("preset", ["exp", "sigmoid", "shifted-linear"])
@pytest.mark.parametrize("beta", [-2.0, 0.5])
def test_presets_nonnegative(preset, beta):
    f = EdgeScoreMap([-3.0, 0.0, 1.0, 2.0])
    w = edge_weights(f, WeightingConfig(preset, beta))
    assert np.all(w >= 0)


def test_shifted_linear_value():
    w = edge_weights(EdgeScoreMap([-1.0, 1.0]), WeightingConfig("shifted-linear", 2.0, shift=0.5))
    np.testing.assert_allclose(w, [0.0, 2.5])


class TestMixing:
    def test_all_same_label(self):
        assert cross_class_mixing(gcn_kernel(path_graph(4)), [0] * 4) == 0.0

    def test_k2_distinct(self):
        assert cross_class_mixing(gcn_kernel(complete_graph(2)), [0, 1]) == 1.0

    def test_label_length(self):
        with pytest.raises(GraphInputError):
            cross_class_mixing(gcn_kernel(path_graph(4)), [0, 1])


class TestCovariance:
    def test_uniform_labels(self):
        g = erdos_renyi(12, 0.4, seed=1)
        cov = node_covariance_report(g, [0] * 12, forman_curvature(g))
        assert np.all(cov == 0)

    def test_constant_scores(self):
        g = erdos_renyi(12, 0.4, seed=1)
        cov = node_covariance_report(g, np.arange(12) % 2, None, scores=np.ones(g.num_edges))
        assert np.max(np.abs(cov)) <= 1e-15

    def test_p3_hand(self):
        cov = node_covariance_report(path_graph(3), [0, 1, 0], None, scores=[1.0, 2.0])
        assert cov.tolist() == [0.0, 0.0, 0.0]


@given(labeled_graphs(min_nodes=3, max_nodes=12), st.integers(0, 2**32 - 1))
def test_monotone_construction(data, seed):
    """Same-class edges score above cross-class edges, so every node covariance is nonpositive."""
    g, y = data
    assume(g.num_edges > 0)
    rng = np.random.default_rng(seed)
    cross = (y[g.edges[:, 0]] != y[g.edges[:, 1]]).astype(float)
    s = 1.0 / (1.0 + rng.random(g.num_edges) + cross)
    cov = node_covariance_report(g, y, None, scores=s)
    np.testing.assert_allclose(cov, independent_copy_covariance(g, y, s), atol=1e-14)
    assert np.all(cov <= 1e-12)
    p, q = gcn_kernel(g), score_kernel(g, s)
    assert cross_class_mixing(q, y) <= cross_class_mixing(p, y) + 1e-12
    # importance-weighting identity
    smat = np.zeros((g.num_nodes, g.num_nodes))
    smat[g.edges[:, 0], g.edges[:, 1]] = s
    smat[g.edges[:, 1], g.edges[:, 0]] = s
    dmat = (y[:, None] != y[None, :]).astype(float)
    has = g.degree_array > 0
    ps = p.matrix * smat
    rhs = (ps * dmat).sum(1)[has] / ps.sum(1)[has]
    assert np.max(np.abs(node_cross_class_mass(q, y)[has] - rhs)) <= 1e-12


class TestRidge:
    def test_one_hot(self):
        y = np.arange(40) % 4
        mask = np.arange(40) < 20
        assert ridge_readout(np.eye(4)[y], y, 1e-3, mask) == 1.0

    def test_independent_features_near_chance(self):
        accs = []
        for seed in range(10):
            rng = np.random.default_rng(seed)
            y = np.repeat([0, 1], 200)
            x = rng.standard_normal((400, 5))
            accs.append(ridge_readout(x, y, 1.0, rng.random(400) < 0.5))
        assert abs(np.mean(accs) - 0.5) <= 0.1

    def test_deterministic(self, rng):
        x, y = rng.standard_normal((50, 3)), np.arange(50) % 2
        mask = np.arange(50) % 3 == 0
        assert ridge_readout(x, y, 0.5, mask) == ridge_readout(x, y, 0.5, mask)

    def test_empty_training_class(self):
        with pytest.raises(GraphInputError):
            ridge_readout(np.ones((4, 1)), [0, 0, 1, 1], 1.0, [True, True, False, False])

    def test_reg_positive(self):
        with pytest.raises(GraphInputError):
            ridge_readout(np.ones((4, 1)), [0, 1, 0, 1], 0.0, [True, True, False, False])
