"""Acceptance checks shared by the ``verify`` command and the test-suite.

Every check is a pure function of a base seed and returns a
:class:`CheckResult` whose ``details`` hold only JSON-ready values, so
reports built from them are byte-reproducible.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .diffusion import (
    gcn_kernel,
    cross_class_mixing,
    independent_copy_covariance,
    node_covariance_report,
    node_cross_class_mass,
    score_kernel,
)
from .errors import ConfigurationError
from .experiment import ExperimentConfig, run_experiment
from .graph import LabeledGraph, build_graph, complete_bipartite_graph, complete_graph, empty_graph, relabel
from .metrics import (
    JointDistribution,
    adjusted_homophily,
    conditional_edge_label_information,
    label_informativeness,
)
from .rewiring import RewiringConfig, rewire_until_stable
from .spectral import (
    CutoffEigengapWarning,
    lappe_from_basis,
    least_squares_residual,
    normalized_adjacency,
    projection_residual,
    propagate,
    select_modes,
    spectral_decomposition,
)
from .stability import embedding_stability_check, perturbation_bound, random_edit
from .synth import GeneratorSpec, erdos_renyi, generate, pairing_table, uniform_table
from .wl import distinguish_detail, load_pair_library

__all__ = ["CheckResult", "CHECKS", "SUITES", "run_suite", "resolve_suite"]


@dataclass
class CheckResult:
    name: str
    criterion: int
    passed: bool
    tolerance: float
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self, timing: bool = False):
        d = {"name": self.name, "criterion": self.criterion, "passed": bool(self.passed),
             "tolerance": self.tolerance, "details": self.details}
        if timing:
            d["seconds"] = self.seconds
        return d

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.criterion:>2} {self.name}"


def _rng(seed, *stream):
    return np.random.default_rng([int(seed), *stream])


def _random_graph(rng, n_lo=2, n_hi=64):
    n = int(rng.integers(n_lo, n_hi + 1))
    p = float(rng.uniform(0.05, 0.5))
    return erdos_renyi(n, p, int(rng.integers(2**31)))


def check_spectral_identity(seed: int = 0, graphs: int = 50) -> CheckResult:
    tol = 1e-8
    rng = _rng(seed, 1)
    worst = 0.0
    for _ in range(graphs):
        g = _random_graph(rng)
        basis = spectral_decomposition(g)
        h0 = rng.standard_normal((g.num_nodes, 3))
        phi, lam = basis.eigenvectors, basis.eigenvalues
        for t in (1, 2, 4):
            direct = propagate(g, h0, t)
            spectral = phi @ (((1.0 - lam) ** t)[:, None] * (phi.T @ h0))
            worst = max(worst, float(np.max(np.abs(direct - spectral))))
    return CheckResult("spectral-identity", 1, worst <= tol, tol,
                       {"graphs": graphs, "max_abs_error": worst})


def check_attenuation(seed: int = 0, graphs: int = 20) -> CheckResult:
    tol = 1e-8
    rng = _rng(seed, 2)
    worst, modes = 0.0, 0
    for _ in range(graphs):
        g = _random_graph(rng, 2, 40)
        basis = spectral_decomposition(g)
        adj = normalized_adjacency(g)
        for k in range(basis.trivial_count, basis.n):
            phi, lam = basis.eigenvectors[:, k], basis.eigenvalues[k]
            modes += 1
            for t in range(1, 9):
                err = abs(np.linalg.norm(propagate(g, phi, t, adj)) - abs(1.0 - lam) ** t)
                worst = max(worst, float(err))
    return CheckResult("attenuation-law", 2, worst <= tol, tol,
                       {"graphs": graphs, "modes": modes, "max_abs_error": worst})


def _monotone_scores(g, labels, rng):
    """Per-edge ``S = f(U)`` with ``U`` in [0,1) for same-class and [1,2) for cross-class edges.

    ``f(u) = exp(-u)`` is positive and decreasing, so every same-class score
    exceeds every cross-class score and each node has ``Cov(S, D) <= 0``.
    """
    e = g.edges
    cross = (labels[e[:, 0]] != labels[e[:, 1]]).astype(np.float64)
    u = rng.random(g.num_edges) + cross
    return np.exp(-u)


def check_mixing(seed: int = 0, instances: int = 200) -> CheckResult:
    tol = 1e-12
    rng = _rng(seed, 3)
    violations = identity_worst = cov_max = 0.0
    fails = 0
    for _ in range(instances):
        g = _random_graph(rng, 4, 48)
        c = int(rng.integers(2, 5))
        labels = rng.integers(0, c, g.num_nodes)
        s = _monotone_scores(g, labels, rng)
        cov = node_covariance_report(g, labels, None, scores=s)
        cov2 = independent_copy_covariance(g, labels, s)
        cov_max = max(cov_max, float(cov.max(initial=0.0)), float(cov2.max(initial=0.0)))
        p, q = gcn_kernel(g), score_kernel(g, s)
        gap = cross_class_mixing(q, labels) - cross_class_mixing(p, labels)
        if gap > tol:
            fails += 1
        violations = max(violations, gap)
        # importance weighting: E_q[D] = E_p[S D] / E_p[S] at every node with neighbours
        cross = (labels[:, None] != labels[None, :]).astype(np.float64)
        smat = np.zeros((g.num_nodes, g.num_nodes))
        smat[g.edges[:, 0], g.edges[:, 1]] = s
        smat[g.edges[:, 1], g.edges[:, 0]] = s
        ps = p.matrix * smat
        has = g.degree_array > 0
        rhs = (ps * cross).sum(1)[has] / ps.sum(1)[has]
        lhs = node_cross_class_mass(q, labels)[has]
        if has.any():
            identity_worst = max(identity_worst, float(np.max(np.abs(lhs - rhs))))
    passed = fails == 0 and identity_worst <= tol and cov_max <= tol
    return CheckResult("cross-class-mixing", 3, passed, tol, {
        "instances": instances, "mixing_violations": fails, "max_mixing_increase": violations,
        "max_node_covariance": cov_max, "max_importance_identity_error": identity_worst})


def check_ls_residual(seed: int = 0, instances: int = 50) -> CheckResult:
    tol = 1e-8
    rng = _rng(seed, 4)
    checked = skipped = fails = 0
    worst = -math.inf
    for _ in range(instances):
        g = _random_graph(rng, 12, 64)
        basis = spectral_decomposition(g)
        if basis.nontrivial_count < 1:
            skipped += 1
            continue
        K = min(8, basis.nontrivial_count)
        t = int(rng.integers(1, 5))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CutoffEigengapWarning)
            cols, _ = select_modes(basis, K)
            pe = lappe_from_basis(basis, K)
        if np.any(np.abs(1.0 - basis.eigenvalues[cols]) ** t <= 1e-9):
            skipped += 1
            continue
        y = rng.standard_normal(g.num_nodes)
        h0 = rng.standard_normal((g.num_nodes, 4))
        design = np.hstack([propagate(g, h0, t), pe.coordinates])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CutoffEigengapWarning)
            proj = projection_residual(y, basis, K)
        diff = least_squares_residual(design, y) - proj
        worst = max(worst, diff)
        checked += 1
        fails += diff > tol
    return CheckResult("ls-residual", 4, fails == 0 and checked > 0, tol, {
        "instances": instances, "checked": checked, "skipped": skipped,
        "max_residual_excess": worst if checked else None})


ACCEPTANCE_WL_MODES = ("plain", "curvature", "common-neighbor", "pe")


def check_wl(seed: int = 0) -> CheckResult:
    rng = _rng(seed, 5)
    rows, problems = [], []
    for pair in load_pair_library():
        g1, g2 = pair["graphs"]
        K = pair["pe_dims"]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CutoffEigengapWarning)
            res = {m: distinguish_detail(g1, g2, m, K=K) for m in ACCEPTANCE_WL_MODES}
            iso = {}
            for i, g in enumerate((g1, g2)):
                h = relabel(g, rng.permutation(g.num_nodes).tolist())
                iso[i] = [m for m in ACCEPTANCE_WL_MODES if distinguish_detail(g, h, m, K=K).distinguished]
        name = pair["name"]
        if res["plain"].distinguished or res["curvature"].distinguished:
            problems.append(f"{name}: plain/curvature separated a 1-WL-equivalent pair")
        if pair.get("triangle_pair"):
            cn = res["common-neighbor"]
            if not cn.distinguished or cn.first_difference_iteration > 2:
                problems.append(f"{name}: common-neighbor did not separate within 2 iterations")
        if res["pe"].eigengap_ok and not res["pe"].distinguished:
            problems.append(f"{name}: pe failed on a pair in general position")
        for i, modes in iso.items():
            if modes:
                problems.append(f"{name}: relabeled copy of graph {i + 1} separated by {modes}")
        rows.append({
            "pair": name, "pe_dims": K,
            **{m: bool(r.distinguished) for m, r in res.items()},
            "common_neighbor_iteration": res["common-neighbor"].first_difference_iteration,
            "pe_general_position": bool(res["pe"].eigengap_ok),
        })
    return CheckResult("wl-expressivity", 5, not problems, 0.0,
                       {"pairs": rows, "problems": problems})


def check_rewiring(seed: int = 0, graphs: int = 100) -> CheckResult:
    rng = _rng(seed, 6)
    problems, stops = [], {}
    max_steps = 200
    total_steps = 0
    for i in range(graphs):
        n = int(rng.integers(10, 401)) if i % 10 == 0 else int(rng.integers(10, 81))
        c = int(rng.integers(2, 5))
        p_in, p_out = rng.uniform(0.02, 0.3, 2) * (8.0 / max(n, 8)) ** 0.5
        table = np.full((c, c), p_out)
        np.fill_diagonal(table, p_in)
        sizes = np.bincount(rng.integers(0, c, n), minlength=c)
        sizes = np.maximum(sizes, 1)
        g = generate(GeneratorSpec(sizes, table, seed=int(rng.integers(2**31)))).graph
        cfg = RewiringConfig(prune_fraction=float(rng.choice([0.01, 0.02, 0.5])),
                             knn_k=int(rng.integers(0, 2)),
                             pe_dims=8, max_steps=max_steps, mode="iterate")
        if cfg.knn_k and spectral_decomposition(g).nontrivial_count < cfg.pe_dims:
            cfg = RewiringConfig(cfg.prune_fraction, 0, cfg.pe_dims, max_steps, "iterate")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CutoffEigengapWarning)
            try:
                out, report = rewire_until_stable(g, cfg)
            except ConfigurationError:
                cfg = RewiringConfig(cfg.prune_fraction, 0, cfg.pe_dims, max_steps, "iterate")
                out, report = rewire_until_stable(g, cfg)
        stops[report.stop_reason] = stops.get(report.stop_reason, 0) + 1
        total_steps += report.steps
        if report.stop_reason not in ("fixed-point", "monitor-nondecrease") or report.steps >= max_steps:
            problems.append(f"graph {i}: stopped with {report.stop_reason} after {report.steps} steps")
        if report.fixed_point_reached and not report.reapplication_stable:
            problems.append(f"graph {i}: fixed point moved on re-application")
        for rec in report.records:
            if len(rec.pruned) != math.ceil(cfg.prune_fraction * rec.positive_count):
                problems.append(f"graph {i}: pruned {len(rec.pruned)} of {rec.positive_count} positive edges")
    return CheckResult("rewiring-termination", 6, not problems, 0.0, {
        "graphs": graphs, "max_steps": max_steps, "stop_reasons": dict(sorted(stops.items())),
        "total_steps": total_steps, "problems": problems})


def check_perturbation(seed: int = 0, trials: int = 1000) -> CheckResult:
    tol = 1e-10
    rng = _rng(seed, 7)
    k2 = perturbation_bound(complete_graph(2), empty_graph(2))
    exact_err = abs(k2.measured - 1.0)
    op_fail = emb_fail = 0
    op_ratio = emb_ratio = 0.0
    for _ in range(trials):
        g1 = _random_graph(rng, 2, 64)
        k = int(rng.integers(1, min(5, g1.num_nodes * (g1.num_nodes - 1) // 2) + 1))
        g2 = random_edit(g1, k, rng)
        pr = perturbation_bound(g1, g2)
        op_fail += not pr.bound_satisfied
        op_ratio = max(op_ratio, pr.measured / pr.bound)
        t = int(rng.integers(1, 5))
        width = int(rng.integers(1, 4))
        dims = [width] + [int(rng.integers(1, 4)) for _ in range(t)]
        weights = [rng.standard_normal((dims[i], dims[i + 1])) for i in range(t)]
        h0 = rng.standard_normal((g1.num_nodes, width))
        emb = embedding_stability_check(g1, g2, weights, h0, T=t,
                                        nonlinearity=str(rng.choice(["identity", "clamp"])))
        emb_fail += not emb.satisfied
        if emb.bound > 0:
            emb_ratio = max(emb_ratio, emb.measured / emb.bound)
    passed = op_fail == 0 and emb_fail == 0 and exact_err <= tol
    return CheckResult("perturbation-bounds", 7, passed, tol, {
        "trials": trials, "operator_failures": op_fail, "embedding_failures": emb_fail,
        "max_operator_ratio": op_ratio, "max_embedding_ratio": emb_ratio,
        "k2_vs_empty": k2.measured, "k2_error": exact_err, "bound_tolerance": k2.tolerance})


def _dyadic_simplex(rng, size, total=8):
    """Random probability vector whose entries are multiples of ``1/total`` (a power of two)."""
    cuts = np.sort(rng.choice(np.arange(1, total), size - 1, replace=False))
    return np.diff(np.concatenate([[0], cuts, [total]])) / total


def _ci_table(rng, size):
    """``p(x) p(e|x) p(y|x)`` with dyadic factors, so ``Y`` and ``E`` are exactly independent given ``X``."""
    px = _dyadic_simplex(rng, size)
    pe = np.stack([_dyadic_simplex(rng, size) for _ in range(size)])
    py = np.stack([_dyadic_simplex(rng, size) for _ in range(size)])
    return px[:, None, None] * pe[:, :, None] * py[:, None, :]


def check_information(seed: int = 0, tables: int = 500) -> CheckResult:
    tol = 1e-12
    rng = _rng(seed, 8)
    worst = 0.0
    for i in range(tables):
        size = 2 if i % 2 == 0 else 3
        t = rng.random((size, size, size)) ** 2
        h_yx, h_yxe, cmi = conditional_edge_label_information(JointDistribution(t / t.sum()))
        worst = max(worst, abs((h_yx - h_yxe) - cmi))
    ci_nonzero = []
    for i in range(50):
        table = _ci_table(rng, 2 if i % 2 == 0 else 3)
        cmi = conditional_edge_label_information(JointDistribution(table))[2]
        if cmi != 0.0:
            ci_nonzero.append(cmi)
    return CheckResult("information-identity", 8, worst <= tol and not ci_nonzero, tol, {
        "tables": tables, "max_identity_error": worst, "ci_tables": 50,
        "ci_nonzero": ci_nonzero})


def check_metric_fixtures(seed: int = 0) -> CheckResult:
    tol = 1e-12
    li_tol = 0.05
    values = {}
    homo = LabeledGraph(build_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5)]),
                        np.array([0, 0, 0, 1, 1, 1]))
    values["h_adj_homophilous"] = adjusted_homophily(homo)
    k22 = LabeledGraph(complete_bipartite_graph(2, 2), np.array([0, 0, 1, 1]))
    values["h_adj_k22"] = adjusted_homophily(k22)
    li_det = []
    for s in range(10):
        for c in (2, 4):
            lg = generate(GeneratorSpec([60] * c, pairing_table(c, 0.1), seed=seed + s))
            li_det.append(label_informativeness(lg))
    li_unif = [label_informativeness(generate(GeneratorSpec([200] * 3, uniform_table(3, 0.05),
                                                            seed=seed + s)))
               for s in range(10)]
    values["li_deterministic_max_error"] = float(max(abs(v - 1.0) for v in li_det))
    values["li_uniform_max_abs"] = float(max(abs(v) for v in li_unif))
    passed = (abs(values["h_adj_homophilous"] - 1.0) <= tol
              and abs(values["h_adj_k22"] + 1.0) <= tol
              and values["li_deterministic_max_error"] <= tol
              and values["li_uniform_max_abs"] <= li_tol)
    values["li_uniform_tolerance"] = li_tol
    return CheckResult("metric-fixtures", 9, passed, tol, values)


def check_trend(seed: int = 0, parallel_trials: int = 1) -> CheckResult:
    gain, band, cap = 5.0, 2.0, 0.70
    cfg = ExperimentConfig(seeds=tuple(range(seed, seed + 10)))
    informative, dominated = run_experiment(cfg=cfg, parallel_trials=parallel_trials)
    inf_d = informative.to_dict()
    passed = (inf_d["mean"]["acc_features"] <= cap
              and informative.gap_points >= gain
              and abs(dominated.gap_points) <= band)
    return CheckResult("directional-trend", 10, passed, band, {
        "required_gain_points": gain, "feature_only_cap": cap, "band_points": band,
        "informative": {k: v for k, v in inf_d.items() if k != "trials"},
        "feature_dominated": {k: v for k, v in dominated.to_dict().items() if k != "trials"},
    })


CHECKS = {
    "spectral-identity": check_spectral_identity,
    "attenuation-law": check_attenuation,
    "cross-class-mixing": check_mixing,
    "ls-residual": check_ls_residual,
    "wl-expressivity": check_wl,
    "rewiring-termination": check_rewiring,
    "perturbation-bounds": check_perturbation,
    "information-identity": check_information,
    "metric-fixtures": check_metric_fixtures,
    "directional-trend": check_trend,
}
SUITES = ("all",) + tuple(CHECKS)


def resolve_suite(suite: str):
    """``all``, a check name, a criterion number, or a comma-separated mix."""
    names = list(CHECKS)
    picked = []
    for tok in (t.strip() for t in suite.split(",")):
        if tok == "all":
            picked.extend(names)
        elif tok in CHECKS:
            picked.append(tok)
        elif tok.isdigit() and 1 <= int(tok) <= len(names):
            picked.append(names[int(tok) - 1])
        else:
            raise ConfigurationError(f"unknown suite {tok!r}; choose from {SUITES} or 1-{len(names)}")
    return list(dict.fromkeys(picked))


def run_suite(suite: str = "all", seed: int = 0, parallel_trials: int = 1):
    results = []
    for name in resolve_suite(suite):
        fn = CHECKS[name]
        start = time.perf_counter()
        res = fn(seed, parallel_trials=parallel_trials) if name == "directional-trend" else fn(seed)
        res.seconds = time.perf_counter() - start
        results.append(res)
    return results
