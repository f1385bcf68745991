import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphgeom.diffusion import ridge_readout
from graphgeom.errors import GraphInputError
from graphgeom.metrics import adjusted_homophily, edge_homophily, label_informativeness
from graphgeom.synth import (
    GeneratorSpec,
    assortative_table,
    cyclic_table,
    erdos_renyi,
    gaussian_features,
    generate,
    pairing_table,
    random_regular_graph,
    uniform_table,
)


def test_identity_table_fully_homophilous():
    lg = generate(GeneratorSpec([20, 20], np.eye(2), seed=0))
    assert edge_homophily(lg) == 1.0 and abs(adjusted_homophily(lg) - 1.0) <= 1e-12


@pytest.mark.parametrize("c", [2, 4, 6])
def test_pairing_table_li_one(c):
    lg = generate(GeneratorSpec([40] * c, pairing_table(c, 0.3), seed=c))
    assert edge_homophily(lg) == 0.0
    assert abs(label_informativeness(lg) - 1.0) <= 1e-12


def test_three_class_cyclic_closure_is_not_deterministic():
    # each class touches both others: the ordered joint is uniform off the diagonal,
    # so LI = log(3/2) / log(3) in expectation
    vals = [label_informativeness(generate(GeneratorSpec([200] * 3, cyclic_table(3, 0.3), seed=s)))
            for s in range(5)]
    expected = 1 - math.log(2) / math.log(3)
    assert abs(np.mean(vals) - expected) <= 0.01
    lg = generate(GeneratorSpec([50] * 3, cyclic_table(3, 0.3), seed=0))
    assert edge_homophily(lg) == 0.0


def test_uniform_table_li_near_zero():
    for s in range(10):
        lg = generate(GeneratorSpec([200] * 3, uniform_table(3, 0.05), seed=s))
        assert lg.graph.num_nodes >= 600
        assert abs(label_informativeness(lg)) <= 0.05


def test_edge_counts_within_three_sigma():
    sizes = [300, 300]
    table = assortative_table(2, 0.04, 0.01)
    lg = generate(GeneratorSpec(sizes, table, seed=11))
    y = lg.labels
    e = lg.graph.edges
    same = y[e[:, 0]] == y[e[:, 1]]
    pairs_in = 2 * (300 * 299 // 2)
    pairs_out = 300 * 300
    for count, pairs, p in [(same.sum(), pairs_in, 0.04), ((~same).sum(), pairs_out, 0.01)]:
        assert abs(count - pairs * p) <= 3 * math.sqrt(pairs * p * (1 - p))


@given(st.integers(0, 2**31 - 1))
def test_determinism(seed):
    spec = GeneratorSpec([10, 12], assortative_table(2, 0.3, 0.1), feature_dim=3, snr=1.0, seed=seed)
    assert generate(spec) == generate(spec)


def test_different_seeds_differ():
    t = uniform_table(2, 0.3)
    assert generate(GeneratorSpec([30, 30], t, seed=1)) != generate(GeneratorSpec([30, 30], t, seed=2))


@pytest.mark.parametrize("table", [np.array([[0.1, 0.2], [0.3, 0.1]]), np.array([[1.5, 0], [0, 1]]),
                                   np.ones((3, 3))])
def test_invalid_table(table):
    with pytest.raises(GraphInputError):
        GeneratorSpec([5, 5], table)


class TestFeatures:
    def test_same_seed_identical(self):
        y = np.repeat([0, 1, 2], 10)
        np.testing.assert_array_equal(gaussian_features(y, 4, 2.0, 3), gaussian_features(y, 4, 2.0, 3))

    def test_snr_zero_is_chance(self):
        accs = []
        for s in range(10):
            y = np.repeat([0, 1], 200)
            x = gaussian_features(y, 4, 0.0, s)
            accs.append(ridge_readout(x, y, 1.0, np.arange(400) % 2 == 0))
        assert abs(np.mean(accs) - 0.5) <= 0.1

    def test_high_snr_separable(self):
        y = np.repeat([0, 1, 2, 3], 50)
        x = gaussian_features(y, 4, 100.0, 0)
        assert ridge_readout(x, y, 1.0, np.arange(200) % 2 == 0) >= 0.99

    def test_groups_share_means(self):
        y = np.repeat([0, 1, 2, 3], 2000)
        x = gaussian_features(y, 4, 5.0, 1, groups=[0, 1, 0, 1])
        means = np.stack([x[y == c].mean(0) for c in range(4)])
        np.testing.assert_allclose(means[0], means[2], atol=0.1)
        assert np.linalg.norm(means[0] - means[1]) > 5

    @pytest.mark.parametrize("d,snr", [(0, 1.0), (3, -1.0)])
    def test_invalid(self, d, snr):
        with pytest.raises(GraphInputError):
            gaussian_features([0, 1], d, snr, 0)


def test_random_regular():
    g = random_regular_graph(12, 3, seed=5)
    assert set(g.degree_array.tolist()) == {3}
    with pytest.raises(GraphInputError):
        random_regular_graph(5, 3, seed=0)


def test_erdos_renyi_density():
    g = erdos_renyi(400, 0.05, seed=3)
    pairs = 400 * 399 / 2
    assert abs(g.num_edges - 0.05 * pairs) <= 3 * math.sqrt(pairs * 0.05 * 0.95)
