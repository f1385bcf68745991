"""Degree-based Forman curvature and the Local Curvature Profile (LCP)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphInputError
from .graph import Graph

__all__ = ["EdgeScoreMap", "forman_curvature", "local_curvature_profile", "LCP_COLUMNS"]

LCP_COLUMNS = ("min", "max", "mean", "std", "median")


@dataclass(frozen=True, eq=False)
class EdgeScoreMap:
    """Real scores aligned row-for-row with ``Graph.edges``."""

    scores: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=np.float64).ravel().copy()
        if not np.all(np.isfinite(s)):
            raise GraphInputError("edge scores must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "scores", s)

    def __len__(self):
        return len(self.scores)

    def check_aligned(self, g: Graph):
        if len(self.scores) != g.num_edges:
            raise GraphInputError(
                f"score map has {len(self.scores)} entries for {g.num_edges} edges")

    def __eq__(self, other):
        if not isinstance(other, EdgeScoreMap):
            return NotImplemented
        return np.array_equal(self.scores, other.scores)

    __hash__ = None


def forman_curvature(g: Graph) -> EdgeScoreMap:
    """``F(u, v) = 4 - deg(u) - deg(v)`` on every edge, raw degrees."""
    if g.num_edges == 0:
        return EdgeScoreMap(np.zeros(0))
    d = g.degree_array
    return EdgeScoreMap(4.0 - d[g.edges[:, 0]] - d[g.edges[:, 1]])


def local_curvature_profile(g: Graph, f: EdgeScoreMap) -> np.ndarray:
    """Per-node (min, max, mean, population std, median) of incident scores.

    Isolated nodes get an all-zero row.
    """
    f.check_aligned(g)
    out = np.zeros((g.num_nodes, 5))
    incident = [[] for _ in range(g.num_nodes)]
    for (u, v), s in zip(g.edges.tolist(), f.scores.tolist()):
        incident[u].append(s)
        incident[v].append(s)
    for v, vals in enumerate(incident):
        if not vals:
            continue
        a = np.asarray(vals)
        out[v] = (a.min(), a.max(), a.mean(), a.std(), np.median(a))
    return out
