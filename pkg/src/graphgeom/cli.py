"""Command-line entry point.

Every command writes a JSON report (stdout unless ``--out``) and exits with
0 on success, 1 when a verification check fails, 2 on bad input or
configuration and 3 on an internal numeric failure. Errors are reported on
stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, io
from .curvature import LCP_COLUMNS, forman_curvature, local_curvature_profile
from .diffusion import (
    PRESETS,
    WeightingConfig,
    cross_class_mixing,
    curvature_kernel,
    gcn_kernel,
    node_covariance_report,
)
from .errors import GraphGeomError, GraphInputError, NumericError
from .experiment import ExperimentConfig, format_table, run_experiment
from .graph import LabeledGraph
from .metrics import conditional_edge_label_information, metric_report
from .rewiring import MODES as REWIRE_MODES
from .rewiring import RewiringConfig, rewire
from .spectral import CutoffEigengapWarning, lappe
from .stability import BOUND_TOL, perturbation_bound, random_edit
from .synth import (
    GeneratorSpec,
    assortative_table,
    cyclic_table,
    erdos_renyi,
    generate,
    pairing_table,
    uniform_table,
)
from .verify import SUITES, run_suite
from .wl import MODES as WL_MODES
from .wl import distinguish_detail

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """Argparse with usage errors routed through the structured error channel."""

    def error(self, message):
        raise GraphInputError(f"{self.prog}: {message}")


def _read(path: str) -> tuple:
    """Load a graph file and return it with the raw text used for the input digest."""
    p = Path(path)
    try:
        text = p.read_bytes().decode("utf-8", errors="replace")
    except OSError as exc:
        raise GraphInputError(f"cannot read {path}: {exc}") from exc
    return io.read_graph(p), text


def _read_labeled(args) -> tuple:
    p = Path(args.graph)
    if p.suffix.lower() == ".json":
        return _read(args.graph)
    lg = io.read_graph(p, getattr(args, "labels", None))
    text = p.read_text()
    if getattr(args, "labels", None):
        text += Path(args.labels).read_text()
    return lg, text


def _emit(report: dict, out) -> None:
    text = io.dumps_report(report)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _gap_ok(caught) -> bool:
    return not any(issubclass(w.category, CutoffEigengapWarning) for w in caught)


# -- commands ---------------------------------------------------------------

def cmd_metrics(args):
    lg, text = _read_labeled(args)
    rep = metric_report(lg)
    return io.make_report("metrics", {}, rep.to_dict(), inputs=[text])


def cmd_curvature(args):
    lg, text = _read_labeled(args)
    g = lg.graph
    f = forman_curvature(g)
    lcp = local_curvature_profile(g, f)
    payload = {
        "edges": g.edges.tolist(),
        "forman": f.scores.tolist(),
        "lcp_columns": list(LCP_COLUMNS),
        "lcp": lcp.tolist(),
    }
    return io.make_report("curvature", {}, payload, inputs=[text])


def cmd_lappe(args):
    lg, text = _read_labeled(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", CutoffEigengapWarning)
        pe = lappe(lg.graph, args.k, extend=not args.no_extend)
    payload = {
        "K": pe.K,
        "requested": pe.requested,
        "eigenvalues": pe.eigenvalues.tolist(),
        "eigengap_ok": bool(pe.eigengap_ok and _gap_ok(caught)),
        "coordinates": pe.coordinates.tolist(),
    }
    return io.make_report("lappe", {"k": args.k, "extend": not args.no_extend}, payload,
                          inputs=[text])


def cmd_diffuse(args):
    lg, text = _read_labeled(args)
    if lg.labels is None:
        raise GraphInputError("diffuse needs node labels")
    cfg = WeightingConfig(args.preset, args.beta, not args.no_normalize, args.shift)
    g = lg.graph
    f = forman_curvature(g)
    p, q = gcn_kernel(g), curvature_kernel(g, f, cfg)
    cov = node_covariance_report(g, lg.labels, f, cfg)
    mix_p, mix_q = cross_class_mixing(p, lg.labels), cross_class_mixing(q, lg.labels)
    payload = {
        "cross_class_mixing_baseline": mix_p,
        "cross_class_mixing_reweighted": mix_q,
        "fallback_rows": np.flatnonzero(q.fallback_rows).tolist(),
        "node_covariance": cov.tolist(),
        "all_covariances_nonpositive": bool(np.all(cov <= 1e-12)),
    }
    checks = []
    if payload["all_covariances_nonpositive"]:
        checks.append({"name": "mixing-not-increased", "passed": mix_q <= mix_p + 1e-12,
                       "tolerance": 1e-12})
    config = {"preset": cfg.preset, "beta": cfg.beta, "normalize": cfg.normalize, "shift": cfg.shift}
    return io.make_report("diffuse", config, payload, checks, inputs=[text])


def cmd_rewire(args):
    lg, text = _read_labeled(args)
    cfg = RewiringConfig(prune_fraction=args.rho, knn_k=args.knn, pe_dims=args.pe_dims,
                         max_steps=args.max_steps, mode=args.mode,
                         lappe_after_prune=args.lappe_after_prune,
                         stop_on_nondecrease=not args.no_monitor_stop)
    out, report = rewire(lg.graph, cfg)
    new = LabeledGraph(out, lg.labels, lg.features)
    if args.out_graph:
        io.write_graph(new, args.out_graph)
    payload = {
        "input_edges": lg.graph.num_edges,
        "output_edges": out.num_edges,
        "report": report.to_dict(),
        "graph": io.graph_to_dict(new),
    }
    config = {"rho": args.rho, "knn": args.knn, "pe_dims": args.pe_dims, "mode": args.mode,
              "max_steps": args.max_steps, "lappe_after_prune": args.lappe_after_prune,
              "stop_on_nondecrease": not args.no_monitor_stop}
    return io.make_report("rewire", config, payload, inputs=[text])


def cmd_wl_test(args):
    lg1, t1 = _read(args.graph1)
    lg2, t2 = _read(args.graph2)
    modes = args.modes.split(",") if args.modes else list(WL_MODES)
    results = {}
    for m in modes:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CutoffEigengapWarning)
            r = distinguish_detail(lg1.graph, lg2.graph, m, K=args.pe_dims, seed=args.seed)
        results[m] = {"distinguished": r.distinguished,
                      "first_difference_iteration": r.first_difference_iteration,
                      "iterations": r.iterations, "eigengap_ok": r.eigengap_ok}
    return io.make_report("wl-test", {"modes": modes, "pe_dims": args.pe_dims, "seed": args.seed},
                          {"results": results}, inputs=[t1, t2])


def _stability_trial(args):
    seed, idx, max_nodes, max_edits = args
    rng = np.random.default_rng([seed, idx])
    n = int(rng.integers(2, max_nodes + 1))
    g1 = erdos_renyi(n, float(rng.uniform(0.05, 0.5)), int(rng.integers(2**31)))
    k = int(rng.integers(1, min(max_edits, n * (n - 1) // 2) + 1))
    g2 = random_edit(g1, k, rng)
    return perturbation_bound(g1, g2).to_dict()


def cmd_stability(args):
    if args.graph1 or args.graph2:
        if not (args.graph1 and args.graph2):
            raise GraphInputError("stability needs both --graph1 and --graph2")
        lg1, t1 = _read(args.graph1)
        lg2, t2 = _read(args.graph2)
        res = perturbation_bound(lg1.graph, lg2.graph)
        checks = [{"name": "operator-norm-bound", "passed": res.bound_satisfied, "tolerance": BOUND_TOL}]
        return io.make_report("stability", {}, res.to_dict(), checks, inputs=[t1, t2])
    jobs = [(args.seed, i, args.max_nodes, args.max_edits) for i in range(args.trials)]
    if args.parallel_trials > 1:
        with ProcessPoolExecutor(max_workers=args.parallel_trials) as pool:
            trials = list(pool.map(_stability_trial, jobs, chunksize=32))
    else:
        trials = [_stability_trial(j) for j in jobs]
    failures = sum(not t["bound_satisfied"] for t in trials)
    payload = {
        "trials": len(trials),
        "failures": failures,
        "max_ratio": max((t["measured"] / t["bound"] for t in trials if t["bound"] > 0), default=0.0),
        "results": trials if args.full else [],
    }
    checks = [{"name": "operator-norm-bound", "passed": failures == 0, "tolerance": BOUND_TOL}]
    config = {"trials": args.trials, "seed": args.seed, "max_nodes": args.max_nodes,
              "max_edits": args.max_edits}
    return io.make_report("stability", config, payload, checks)


def cmd_info(args):
    jd = io.read_joint(args.joint)
    h_yx, h_yxe, cmi = conditional_edge_label_information(jd)
    payload = {"H_Y_given_X": h_yx, "H_Y_given_XE": h_yxe, "I_Y_E_given_X": cmi,
               "identity_error": abs((h_yx - h_yxe) - cmi)}
    checks = [{"name": "entropy-gap-identity", "passed": payload["identity_error"] <= 1e-12,
               "tolerance": 1e-12}]
    return io.make_report("info", {}, payload, checks, inputs=[Path(args.joint).read_text()])


_TABLES = {
    "uniform": lambda c, a: uniform_table(c, a.p),
    "assortative": lambda c, a: assortative_table(c, a.p, a.p_out),
    "pairing": lambda c, a: pairing_table(c, a.p, a.p_out),
    "cyclic": lambda c, a: cyclic_table(c, a.p),
}


def cmd_generate(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    if args.table_file:
        table = np.asarray(json.loads(Path(args.table_file).read_text()), dtype=np.float64)
    else:
        table = _TABLES[args.table](len(sizes), args)
    groups = [int(x) for x in args.feature_groups.split(",")] if args.feature_groups else None
    spec = GeneratorSpec(sizes, table, args.feature_dim, args.snr, args.seed, groups)
    lg = generate(spec)
    if args.out:
        io.write_graph(lg, args.out)
        return None
    sys.stdout.write(io.dumps_graph(lg))
    return None


def cmd_verify(args):
    results = run_suite(args.suite, args.seed, args.parallel_trials)
    for r in results:
        print(r.line(), file=sys.stderr)
    checks = [{"name": r.name, "passed": r.passed, "tolerance": r.tolerance} for r in results]
    payload = {"criteria": [r.to_dict() for r in results]}
    return io.make_report("verify", {"suite": args.suite, "seed": args.seed}, payload, checks)


def cmd_experiment(args):
    cfg = ExperimentConfig(seeds=tuple(range(args.seed, args.seed + args.seeds)), hops=args.hops,
                           pe_dims=args.pe_dims, prune_fraction=args.rho, knn_k=args.knn,
                           reg=args.reg)
    summaries = run_experiment(cfg=cfg, parallel_trials=args.parallel_trials)
    print(format_table(summaries), file=sys.stderr)
    config = {"seed": args.seed, "seeds": args.seeds, "hops": args.hops, "pe_dims": args.pe_dims,
              "rho": args.rho, "knn": args.knn, "reg": args.reg}
    return io.make_report("experiment", config, {"regimes": [s.to_dict() for s in summaries]})


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="graphgeom", description="Graph curvature, spectral encodings and rewiring checks.")
    ap.add_argument("--version", action="version", version=f"graphgeom {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def graph_cmd(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--graph", required=True, help="graph JSON or tab-separated edge list")
        p.add_argument("--labels", help="label sidecar for edge-list input")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.set_defaults(func=fn)
        return p

    graph_cmd("metrics", cmd_metrics, "edge homophily, adjusted homophily and label informativeness")
    graph_cmd("curvature", cmd_curvature, "per-edge Forman curvature and per-node LCP")
    p = graph_cmd("lappe", cmd_lappe, "Laplacian positional encoding")
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--no-extend", action="store_true", help="do not widen K to an eigenvalue-cluster boundary")
    p = graph_cmd("diffuse", cmd_diffuse, "baseline vs curvature-reweighted transition kernels")
    p.add_argument("--preset", choices=PRESETS, default="exp")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--shift", type=float, default=1.0)
    p.add_argument("--no-normalize", action="store_true")
    p = graph_cmd("rewire", cmd_rewire, "curvature-guided rewiring")
    p.add_argument("--rho", type=float, default=0.01, help="fraction of positive-curvature edges pruned per step")
    p.add_argument("--knn", type=int, default=1, help="LapPE nearest neighbours added per node")
    p.add_argument("--pe-dims", type=int, default=8, help="LapPE dimension used for the kNN step")
    p.add_argument("--mode", choices=REWIRE_MODES, default="one-shot")
    p.add_argument("--max-steps", type=int, default=200, help="iteration cap in iterate mode")
    p.add_argument("--lappe-after-prune", action="store_true", help="compute LapPE on the pruned graph")
    p.add_argument("--no-monitor-stop", action="store_true", help="keep iterating when the monitor stalls")
    p.add_argument("--out-graph", help="also write the rewired graph JSON here")

    p = sub.add_parser("wl-test", help="1-WL distinguishability of two graphs across modes")
    p.add_argument("--graph1", required=True)
    p.add_argument("--graph2", required=True)
    p.add_argument("--modes", help=f"comma-separated subset of {','.join(WL_MODES)}")
    p.add_argument("--pe-dims", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_wl_test)

    p = sub.add_parser("stability", help="operator-norm perturbation bound")
    p.add_argument("--graph1")
    p.add_argument("--graph2")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-nodes", type=int, default=64)
    p.add_argument("--max-edits", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallel-trials", type=int, default=1)
    p.add_argument("--full", action="store_true", help="include every trial in the report")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("info", help="conditional edge-label information of a joint table")
    p.add_argument("--joint", required=True, help='JSON {"table": [[[...]]]} indexed [x][e][y]')
    p.add_argument("--out")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("generate", help="seeded synthetic labeled graph")
    p.add_argument("--sizes", required=True, help="nodes per class, comma-separated")
    p.add_argument("--table", choices=sorted(_TABLES), default="uniform")
    p.add_argument("--table-file", help="JSON C x C probability table (overrides --table)")
    p.add_argument("--p", type=float, default=0.05)
    p.add_argument("--p-out", type=float, default=0.0)
    p.add_argument("--feature-dim", type=int, default=0)
    p.add_argument("--snr", type=float, default=1.0)
    p.add_argument("--feature-groups")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)}, a criterion number, or a list")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallel-trials", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="synthetic trend study")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=10, help="number of consecutive seeds")
    p.add_argument("--hops", type=int, default=1)
    p.add_argument("--pe-dims", type=int, default=8)
    p.add_argument("--rho", type=float, default=0.01)
    p.add_argument("--knn", type=int, default=1)
    p.add_argument("--reg", type=float, default=1.0)
    p.add_argument("--parallel-trials", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return ap


def _fail(kind: str, exc: Exception, code: int) -> int:
    err = {"status": "error", "kind": kind, "type": type(exc).__name__, "message": str(exc)}
    diag = getattr(exc, "diagnostics", None)
    if diag:
        err["diagnostics"] = diag
    sys.stderr.write(json.dumps(err, default=str) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "parallel_trials", 1) < 1:
            raise GraphInputError("--parallel-trials must be at least 1")
        report = args.func(args)
    except NumericError as exc:
        return _fail("numeric", exc, EXIT_NUMERIC)
    except (GraphInputError, KeyError, json.JSONDecodeError) as exc:
        return _fail("input", exc, EXIT_INPUT)
    except OSError as exc:
        return _fail("input", exc, EXIT_INPUT)
    except (GraphGeomError, np.linalg.LinAlgError, FloatingPointError) as exc:
        return _fail("numeric", exc, EXIT_NUMERIC)
    if report is None:
        return EXIT_OK
    _emit(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
