"""Transition kernels, cross-class mixing and a closed-form linear readout.

Kernels here use the loop-free weights ``w_ij = 1/sqrt(d_i d_j)`` on edges.
The spectral module's normalized adjacency includes self loops; the two
conventions are intentionally kept apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curvature import EdgeScoreMap
from .errors import ConfigurationError, GraphInputError
from .graph import Graph

__all__ = [
    "TransitionKernel",
    "WeightingConfig",
    "PRESETS",
    "edge_weights",
    "gcn_kernel",
    "score_kernel",
    "curvature_kernel",
    "cross_class_mixing",
    "node_cross_class_mass",
    "node_covariance_report",
    "independent_copy_covariance",
    "ridge_readout",
]

PRESETS = ("exp", "sigmoid", "shifted-linear")


@dataclass(frozen=True, eq=False)
class TransitionKernel:
    matrix: np.ndarray
    # rows that had a zero score normalizer and reuse the baseline row
    fallback_rows: np.ndarray = field(default=None)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        fb = self.fallback_rows
        fb = np.zeros(len(m), dtype=bool) if fb is None else np.asarray(fb, dtype=bool)
        fb.setflags(write=False)
        object.__setattr__(self, "fallback_rows", fb)

    @property
    def n(self):
        return len(self.matrix)


@dataclass(frozen=True)
class WeightingConfig:
    """Maps curvature to nonnegative edge scores.

    ``exp``: ``exp(beta * F)``; ``sigmoid``: ``1 / (1 + exp(-beta * F))``;
    ``shifted-linear``: ``max(0, beta * F + shift)``. With ``normalize`` the
    curvature is z-scored over edges first (a constant curvature maps to 0).
    """

    preset: str = "exp"
    beta: float = 1.0
    normalize: bool = True
    shift: float = 1.0

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigurationError(
                f"unknown weighting preset {self.preset!r}; choose from {PRESETS}")


def edge_weights(f: EdgeScoreMap, cfg: WeightingConfig) -> np.ndarray:
    c = np.asarray(f.scores, dtype=np.float64)
    if cfg.normalize and len(c):
        sd = c.std()
        c = (c - c.mean()) / sd if sd > 0 else np.zeros_like(c)
    z = cfg.beta * c
    if cfg.preset == "exp":
        return np.exp(z)
    if cfg.preset == "sigmoid":
        return 0.5 * (1.0 + np.tanh(0.5 * z))
    return np.maximum(0.0, z + cfg.shift)


def _loop_free_weights(g: Graph) -> np.ndarray:
    """Dense ``w_ij = 1/sqrt(d_i d_j)`` on edges, zero elsewhere."""
    n = g.num_nodes
    w = np.zeros((n, n))
    if g.num_edges:
        d = g.degree_array.astype(np.float64)
        u, v = g.edges[:, 0], g.edges[:, 1]
        val = 1.0 / np.sqrt(d[u] * d[v])
        w[u, v] = val
        w[v, u] = val
    return w


def _row_normalize(w: np.ndarray) -> np.ndarray:
    out = np.zeros_like(w)
    rs = w.sum(axis=1)
    ok = rs > 0
    out[ok] = w[ok] / rs[ok, None]
    # isolated nodes: absorbing self row
    idx = np.flatnonzero(~ok)
    out[idx, idx] = 1.0
    return out


def gcn_kernel(g: Graph) -> TransitionKernel:
    return TransitionKernel(_row_normalize(_loop_free_weights(g)))


def score_kernel(g: Graph, scores) -> TransitionKernel:
    """Kernel ``q_ij ∝ w_ij s_ij`` for explicit nonnegative per-edge scores."""
    s = np.asarray(scores, dtype=np.float64)
    if s.shape != (g.num_edges,):
        raise GraphInputError(f"need one score per edge ({g.num_edges}), got {s.shape}")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise GraphInputError("edge scores must be finite and nonnegative")
    w = _loop_free_weights(g)
    sm = np.zeros_like(w)
    if g.num_edges:
        u, v = g.edges[:, 0], g.edges[:, 1]
        sm[u, v] = s
        sm[v, u] = s
    ws = w * sm
    base = _row_normalize(w)
    rs = ws.sum(axis=1)
    has_nbrs = g.degree_array > 0
    fallback = has_nbrs & (rs <= 0)
    # rows whose neighbour scores are all equal reduce to the baseline row; reuse it bit-for-bit
    adj = w > 0
    flat = np.where(adj, sm, np.inf).min(axis=1) == np.where(adj, sm, -np.inf).max(axis=1)
    q = base.copy()
    ok = (rs > 0) & ~flat
    q[ok] = ws[ok] / rs[ok, None]
    return TransitionKernel(q, fallback)


def curvature_kernel(g: Graph, f: EdgeScoreMap, cfg: WeightingConfig = WeightingConfig()) -> TransitionKernel:
    f.check_aligned(g)
    return score_kernel(g, edge_weights(f, cfg))


def _label_array(labels, n):
    if labels is None:
        raise GraphInputError("labels are required")
    y = np.asarray(labels)
    if y.shape != (n,):
        raise GraphInputError(f"labels must have length {n}")
    return y


def node_cross_class_mass(kernel: TransitionKernel, labels) -> np.ndarray:
    """Per-node ``E[1{y_i != y_J}]`` under ``J ~ kernel[i]``."""
    y = _label_array(labels, kernel.n)
    cross = y[:, None] != y[None, :]
    return (kernel.matrix * cross).sum(axis=1)


def cross_class_mixing(kernel: TransitionKernel, labels) -> float:
    # sequential reduction keeps the result independent of BLAS threading
    return float(sum(node_cross_class_mass(kernel, labels).tolist()) / kernel.n)


def _per_node_sd(g: Graph, labels, scores):
    """Neighbour lists with baseline probabilities, scores and cross-class flags."""
    y = _label_array(labels, g.num_nodes)
    p = gcn_kernel(g).matrix
    out = []
    idx = g.edge_index
    for i, nbrs in enumerate(g.neighbors):
        if not nbrs:
            out.append(None)
            continue
        nb = np.asarray(nbrs)
        prob = p[i, nb]
        s = np.array([scores[idx[(min(i, j), max(i, j))]] for j in nbrs])
        d = (y[nb] != y[i]).astype(np.float64)
        out.append((prob, s, d))
    return out


def node_covariance_report(g: Graph, labels, f: EdgeScoreMap,
                           cfg: WeightingConfig = WeightingConfig(), scores=None) -> np.ndarray:
    """``Cov(S, D)`` under ``J ~ p_i`` for every node (0 for isolated nodes).

    ``scores`` overrides the curvature-derived edge scores when given.
    """
    if scores is None:
        f.check_aligned(g)
        scores = edge_weights(f, cfg)
    cov = np.zeros(g.num_nodes)
    for i, item in enumerate(_per_node_sd(g, labels, np.asarray(scores, dtype=np.float64))):
        if item is None:
            continue
        prob, s, d = item
        cov[i] = prob @ (s * d) - (prob @ s) * (prob @ d)
    return cov


def independent_copy_covariance(g: Graph, labels, scores) -> np.ndarray:
    """Per-node ``1/2 E[(S - S')(D - D')]`` with ``J, J'`` i.i.d. from ``p_i``."""
    cov = np.zeros(g.num_nodes)
    for i, item in enumerate(_per_node_sd(g, labels, np.asarray(scores, dtype=np.float64))):
        if item is None:
            continue
        prob, s, d = item
        ds = s[:, None] - s[None, :]
        dd = d[:, None] - d[None, :]
        cov[i] = 0.5 * np.sum(prob[:, None] * prob[None, :] * ds * dd)
    return cov


def ridge_readout(features, labels, reg: float, train_mask) -> float:
    """One-vs-all ridge regression on the training rows; accuracy on the rest.

    A bias column is appended to the features and regularized with them.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    y = np.asarray(labels, dtype=np.int64)
    mask = np.asarray(train_mask, dtype=bool)
    if x.shape[0] != len(y) or len(mask) != len(y):
        raise GraphInputError("features, labels and mask must have matching length")
    if reg <= 0:
        raise GraphInputError("reg must be positive")
    c = int(y.max()) + 1
    train_counts = np.bincount(y[mask], minlength=c)
    if np.any(train_counts == 0):
        raise GraphInputError(
            f"every class needs a training node; empty classes: {np.flatnonzero(train_counts == 0).tolist()}")
    test = ~mask
    if not test.any():
        raise GraphInputError("no evaluation nodes outside the training mask")
    xb = np.hstack([x, np.ones((len(x), 1))])
    xt = xb[mask]
    target = np.eye(c)[y[mask]]
    gram = xt.T @ xt + reg * np.eye(xb.shape[1])
    coef = np.linalg.solve(gram, xt.T @ target)
    pred = np.argmax(xb[test] @ coef, axis=1)
    return float(np.mean(pred == y[test]))
