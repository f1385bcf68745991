import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphgeom.errors import ConfigurationError
from graphgeom.graph import build_graph, complete_graph, cycle_graph, path_graph
from graphgeom.rewiring import (
    RewiringConfig,
    knn_additions,
    lyapunov,
    positive_edges,
    rewire,
    rewire_step,
    rewire_until_stable,
)
from graphgeom.spectral import lappe
from graphgeom.synth import GeneratorSpec, assortative_table, generate

from conftest import graphs


def edges_of(g):
    return [tuple(e) for e in g.edges.tolist()]


def test_no_positive_edges_no_knn_unchanged():
    g = complete_graph(4)
    out, rec = rewire_step(g, RewiringConfig(knn_k=0))
    assert out == g and not rec.changed and rec.positive_count == 0


def test_p3_prunes_lexicographic_first():
    out, rec = rewire_step(path_graph(3), RewiringConfig(prune_fraction=0.5, knn_k=0))
    assert rec.pruned == [[0, 1]]
    assert edges_of(out) == [(1, 2)]


def test_pruning_order_score_then_edge():
    # path 0-1-2-3 (end edges F=1, middle F=0) plus a separate K_2 (F=2)
    g = build_graph(6, [(0, 1), (1, 2), (2, 3), (4, 5)])
    pos, scores = positive_edges(g)
    assert pos == [(4, 5), (0, 1), (2, 3)]
    assert scores == [2.0, 1.0, 1.0]


def test_c6_knn_matches_brute_force():
    g = cycle_graph(6)
    pe = lappe(g, 2)
    p = pe.coordinates
    expected = set()
    for u in range(6):
        cands = [w for w in range(6) if w != u and not g.has_edge(u, w)]
        w = min(cands, key=lambda w: (round(float(np.sum((p[u] - p[w]) ** 2)), 9), w))
        expected.add((min(u, w), max(u, w)))
    out, rec = rewire_step(g, RewiringConfig(prune_fraction=0.01, knn_k=1, pe_dims=2))
    assert rec.pruned == []
    assert {tuple(e) for e in rec.added} == expected
    assert set(edges_of(out)) == set(edges_of(g)) | expected
    assert all(out.degree_array - g.degree_array <= 2)


def test_knn_skips_existing_edges():
    g = complete_graph(4)
    assert knn_additions(np.zeros((4, 1)), g, 2) == []


def test_fixed_point_zero_steps():
    out, rep = rewire_until_stable(complete_graph(4), RewiringConfig(knn_k=0, mode="iterate"))
    assert rep.steps == 0 and rep.fixed_point_reached and rep.reapplication_stable
    assert rep.stop_reason == "fixed-point"


def test_p3_strict_monitor_stalls_after_first_step():
    # pruning (0,1) leaves the single edge (1,2) whose curvature is 2: the monitor stays at 2
    out, rep = rewire_until_stable(path_graph(3), RewiringConfig(prune_fraction=0.5, knn_k=0, mode="iterate"))
    assert rep.steps == 1 and rep.stop_reason == "monitor-nondecrease"
    assert rep.records[0].lyapunov_before == 2.0 == rep.records[0].lyapunov_after
    assert edges_of(out) == [(1, 2)]


def test_p3_without_monitor_stop_reaches_empty_fixed_point():
    cfg = RewiringConfig(prune_fraction=0.5, knn_k=0, mode="iterate", stop_on_nondecrease=False)
    out, rep = rewire_until_stable(path_graph(3), cfg)
    assert out.num_edges == 0 and rep.steps <= 3
    assert rep.fixed_point_reached and rep.reapplication_stable


def test_one_shot_equals_single_step():
    g = generate(GeneratorSpec([20, 20], assortative_table(2, 0.2, 0.05), seed=3)).graph
    cfg = RewiringConfig(prune_fraction=0.02, knn_k=1, pe_dims=4)
    a, _ = rewire(g, cfg)
    b, _ = rewire_step(g, cfg)
    assert a == b


@pytest.mark.parametrize("after", [False, True])
def test_lappe_source_flag(after):
    g = generate(GeneratorSpec([15, 15], assortative_table(2, 0.25, 0.05), seed=8)).graph
    cfg = RewiringConfig(prune_fraction=0.5, knn_k=1, pe_dims=3, lappe_after_prune=after)
    _, rec = rewire_step(g, cfg)
    pruned = build_graph(g.num_nodes, set(edges_of(g)) - {tuple(e) for e in rec.pruned})
    source = pruned if after else g
    expected = knn_additions(lappe(source, 3).coordinates, pruned, 1)
    assert [tuple(e) for e in rec.added] == expected


def test_insufficient_spectrum_is_configuration_error():
    with pytest.raises(ConfigurationError):
        rewire_step(path_graph(4), RewiringConfig(knn_k=1, pe_dims=8))


@pytest.mark.parametrize("kwargs", [{"prune_fraction": 0.0}, {"prune_fraction": 1.0}, {"knn_k": -1},
                                    {"pe_dims": 0}, {"max_steps": 0}, {"mode": "forever"}])
def test_config_validation(kwargs):
    with pytest.raises(ConfigurationError):
        RewiringConfig(**kwargs)


@given(graphs(min_nodes=2, max_nodes=14), st.sampled_from([0.01, 0.02, 0.3, 0.5]))
def test_pruned_count_and_monitor(g, rho):
    cfg = RewiringConfig(prune_fraction=rho, knn_k=0, mode="iterate", max_steps=50)
    out, rep = rewire_until_stable(g, cfg)
    assert rep.stop_reason in ("fixed-point", "monitor-nondecrease")
    for rec in rep.records:
        assert len(rec.pruned) == math.ceil(rho * rec.positive_count)
    if rep.fixed_point_reached:
        assert rep.reapplication_stable
    assert lyapunov(out) <= lyapunov(g) or rep.stop_reason == "monitor-nondecrease"


def test_determinism():
    g = generate(GeneratorSpec([30, 30], assortative_table(2, 0.15, 0.05), seed=1)).graph
    cfg = RewiringConfig(prune_fraction=0.02, knn_k=1, pe_dims=8, mode="iterate")
    a, ra = rewire(g, cfg)
    b, rb = rewire(g, cfg)
    assert a == b and ra.to_dict() == rb.to_dict()


def test_report_flags_surrogate_monitor():
    _, rep = rewire(path_graph(3), RewiringConfig(prune_fraction=0.5, knn_k=0))
    assert "surrogate" in rep.to_dict()["lyapunov_monitor"]
