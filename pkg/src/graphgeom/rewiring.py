"""Curvature-guided rewiring: prune positive-curvature edges, add LapPE kNN edges.

One step on ``G_t``:

1. score every edge by Forman curvature on ``G_t``; among the positive ones,
   ordered by (score descending, edge ascending), drop the first
   ``ceil(rho * |E+|)``;
2. compute LapPE on ``G_t`` (or on the pruned graph with
   ``lappe_after_prune``) and connect every node to its ``knn_k`` nearest
   non-neighbours in the pruned graph, distance ties broken by node id.

The iteration stops at a fixed point, when the Lyapunov monitor (total
positive curvature) fails to decrease, or after ``max_steps``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .curvature import forman_curvature
from .errors import ConfigurationError, InsufficientSpectrumError
from .graph import Graph, build_graph
from .spectral import CutoffEigengapWarning, lappe

__all__ = [
    "RewiringConfig",
    "StepRecord",
    "RewiringReport",
    "lyapunov",
    "positive_edges",
    "knn_additions",
    "rewire_step",
    "rewire_until_stable",
    "rewire",
]

MODES = ("one-shot", "iterate")
# kNN distances are compared after rounding to this many decimals so that
# symmetric graphs tie exactly and the node-id tie-break applies
KNN_DECIMALS = 9


@dataclass(frozen=True)
class RewiringConfig:
    prune_fraction: float = 0.01
    knn_k: int = 1
    pe_dims: int = 8
    max_steps: int = 200
    mode: str = "one-shot"
    lappe_after_prune: bool = False
    stop_on_nondecrease: bool = True

    def __post_init__(self):
        if not 0.0 < self.prune_fraction < 1.0:
            raise ConfigurationError(f"prune_fraction must lie in (0, 1), got {self.prune_fraction}")
        if self.knn_k < 0:
            raise ConfigurationError("knn_k must be nonnegative")
        if self.pe_dims < 1:
            raise ConfigurationError("pe_dims must be positive")
        if self.max_steps < 1:
            raise ConfigurationError("max_steps must be positive")
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass
class StepRecord:
    positive_count: int
    pruned: list
    added: list
    lyapunov_before: float
    lyapunov_after: float
    monotone_decrease: bool
    eigengap_ok: bool = True

    @property
    def changed(self):
        return bool(self.pruned or self.added)

    def to_dict(self):
        return asdict(self)


@dataclass
class RewiringReport:
    steps: int
    records: list = field(default_factory=list)
    fixed_point_reached: bool = False
    reapplication_stable: bool = False
    stop_reason: str = ""
    cycle_detected: bool = False
    # the monitor is a concrete surrogate, not a guaranteed Lyapunov function
    lyapunov_monitor: str = "sum of positive Forman curvature (surrogate)"

    def to_dict(self):
        d = asdict(self)
        d["records"] = [r.to_dict() for r in self.records]
        return d


def positive_edges(g: Graph):
    """Positive-curvature edges in pruning order, with their scores."""
    f = forman_curvature(g).scores
    pos = np.flatnonzero(f > 0)
    if not len(pos):
        return [], []
    e = g.edges[pos]
    order = np.lexsort((e[:, 1], e[:, 0], -f[pos]))
    return [tuple(x) for x in e[order].tolist()], f[pos][order].tolist()


def lyapunov(g: Graph) -> float:
    f = forman_curvature(g).scores
    return float(f[f > 0].sum())


def knn_additions(coords: np.ndarray, g: Graph, k: int):
    """Edges from each node to its ``k`` nearest non-neighbours in ``g``."""
    n = g.num_nodes
    if k == 0 or n < 2:
        return []
    sq = np.sum(coords ** 2, axis=1)
    dist = sq[:, None] + sq[None, :] - 2.0 * coords @ coords.T
    dist = np.round(np.maximum(dist, 0.0), KNN_DECIMALS)
    blocked = np.eye(n, dtype=bool)
    if g.num_edges:
        blocked[g.edges[:, 0], g.edges[:, 1]] = True
        blocked[g.edges[:, 1], g.edges[:, 0]] = True
    ids = np.arange(n)
    added = set()
    for u in range(n):
        cand = ids[~blocked[u]]
        if not len(cand):
            continue
        order = np.lexsort((cand, dist[u, cand]))[:k]
        for w in cand[order].tolist():
            added.add((min(u, w), max(u, w)))
    return sorted(added)


def rewire_step(g: Graph, cfg: RewiringConfig):
    """One application of the rewiring operator. Returns ``(graph, StepRecord)``."""
    before = lyapunov(g)
    pos, _ = positive_edges(g)
    n_prune = math.ceil(cfg.prune_fraction * len(pos)) if pos else 0
    pruned = pos[:n_prune]
    drop = set(pruned)
    kept = [e for e in map(tuple, g.edges.tolist()) if e not in drop]
    pruned_graph = build_graph(g.num_nodes, kept)

    added = []
    gap_ok = True
    if cfg.knn_k > 0:
        source = pruned_graph if cfg.lappe_after_prune else g
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", CutoffEigengapWarning)
            try:
                pe = lappe(source, cfg.pe_dims)
            except InsufficientSpectrumError as exc:
                raise ConfigurationError(
                    f"cannot build {cfg.pe_dims}-dim LapPE for kNN additions: {exc}") from exc
        gap_ok = pe.eigengap_ok and not any(
            issubclass(w.category, CutoffEigengapWarning) for w in caught)
        added = knn_additions(pe.coordinates, pruned_graph, cfg.knn_k)

    out = build_graph(g.num_nodes, kept + added)
    after = lyapunov(out)
    rec = StepRecord(
        positive_count=len(pos),
        pruned=[list(e) for e in pruned],
        added=[list(e) for e in added],
        lyapunov_before=before,
        lyapunov_after=after,
        monotone_decrease=after < before,
        eigengap_ok=gap_ok,
    )
    return out, rec


def rewire_until_stable(g: Graph, cfg: RewiringConfig):
    """Iterate :func:`rewire_step` until a fixed point, a monitor stall, or ``max_steps``.

    The returned graph is the last one produced, including a step that
    stalled the monitor. On a fixed point the operator is applied once more
    and ``reapplication_stable`` records whether the graph stayed put.
    """
    report = RewiringReport(steps=0)
    visited = {g}
    current = g
    for _ in range(cfg.max_steps):
        nxt, rec = rewire_step(current, cfg)
        if nxt == current:
            report.fixed_point_reached = True
            again, _ = rewire_step(nxt, cfg)
            report.reapplication_stable = again == nxt
            report.stop_reason = "fixed-point"
            return current, report
        report.records.append(rec)
        report.steps += 1
        current = nxt
        if nxt in visited:
            report.cycle_detected = True
        visited.add(nxt)
        if not rec.monotone_decrease and cfg.stop_on_nondecrease:
            report.stop_reason = "monitor-nondecrease"
            return current, report
        if report.cycle_detected:
            report.stop_reason = "cycle"
            return current, report
    report.stop_reason = "max-steps"
    return current, report


def rewire(g: Graph, cfg: RewiringConfig):
    """Dispatch on ``cfg.mode``; one-shot is exactly one :func:`rewire_step`."""
    if cfg.mode == "iterate":
        return rewire_until_stable(g, cfg)
    out, rec = rewire_step(g, cfg)
    report = RewiringReport(steps=1 if rec.changed else 0, records=[rec],
                            fixed_point_reached=not rec.changed,
                            reapplication_stable=not rec.changed,
                            stop_reason="one-shot")
    return out, report
