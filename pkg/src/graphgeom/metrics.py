"""Homophily descriptors, label informativeness and conditional edge-label information.

All entropies are in nats. Label informativeness is a ratio of entropies
and therefore independent of the logarithm base.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateLabelsError, GraphInputError
from .graph import LabeledGraph

__all__ = [
    "MetricReport",
    "JointDistribution",
    "edge_homophily",
    "adjusted_homophily",
    "label_informativeness",
    "class_degree_mass",
    "ordered_label_joint",
    "metric_report",
    "conditional_edge_label_information",
    "entropy",
]

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class MetricReport:
    edge_homophily: float
    adjusted_homophily: float
    label_informativeness: float
    class_degree_mass: tuple

    def to_dict(self):
        d = asdict(self)
        d["class_degree_mass"] = list(self.class_degree_mass)
        return d


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability table ``p[x, e, y]`` over finite node-side, edge and label alphabets."""

    table: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.table, dtype=np.float64)
        if p.ndim != 3:
            raise GraphInputError(f"joint table must be 3-dimensional, got shape {p.shape}")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise GraphInputError("joint table entries must be finite and nonnegative")
        total = p.sum()
        if abs(total - 1.0) > 1e-12:
            raise GraphInputError(f"joint table must sum to 1 (got {total!r})")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "table", p)

    @property
    def shape(self):
        return self.table.shape


def entropy(p) -> float:
    """Shannon entropy in nats of a (possibly multi-dimensional) probability table."""
    p = np.asarray(p, dtype=np.float64).ravel()
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def _require_labels(lg: LabeledGraph):
    if lg.labels is None:
        raise GraphInputError("labels are required")
    if lg.graph.num_edges == 0:
        raise GraphInputError("metric undefined on a graph without edges")
    return lg.labels


def edge_homophily(lg: LabeledGraph) -> float:
    y = _require_labels(lg)
    e = lg.graph.edges
    return float(np.mean(y[e[:, 0]] == y[e[:, 1]]))


def class_degree_mass(lg: LabeledGraph) -> np.ndarray:
    """Degree-weighted class distribution; isolated nodes carry no mass."""
    y = _require_labels(lg)
    mass = np.bincount(y, weights=lg.graph.degree_array, minlength=lg.num_classes)
    return mass / (2.0 * lg.graph.num_edges)


def adjusted_homophily(lg: LabeledGraph) -> float:
    h = edge_homophily(lg)
    pbar = class_degree_mass(lg)
    null = float(np.sum(pbar ** 2))
    denom = 1.0 - null
    if denom <= DEGENERATE_TOL:
        raise DegenerateLabelsError(
            "degenerate label distribution: one class carries all degree mass")
    return (h - null) / denom


def ordered_label_joint(lg: LabeledGraph) -> np.ndarray:
    """Joint of (y_xi, y_eta) over ordered endpoints, both orientations weighted 1/(2m)."""
    y = _require_labels(lg)
    c = lg.num_classes
    e = lg.graph.edges
    a, b = y[e[:, 0]], y[e[:, 1]]
    joint = np.zeros((c, c))
    np.add.at(joint, (a, b), 1.0)
    np.add.at(joint, (b, a), 1.0)
    return joint / (2.0 * len(e))


def label_informativeness(lg: LabeledGraph) -> float:
    joint = ordered_label_joint(lg)
    marg = joint.sum(axis=1)
    h = entropy(marg)
    if h <= DEGENERATE_TOL:
        raise DegenerateLabelsError(
            "degenerate label distribution: endpoint label entropy is zero")
    mi = entropy(marg) + entropy(joint.sum(axis=0)) - entropy(joint)
    return mi / h


def metric_report(lg: LabeledGraph) -> MetricReport:
    return MetricReport(
        edge_homophily=edge_homophily(lg),
        adjusted_homophily=adjusted_homophily(lg),
        label_informativeness=label_informativeness(lg),
        class_degree_mass=tuple(float(v) for v in class_degree_mass(lg)),
    )


def conditional_edge_label_information(jd: JointDistribution):
    """Return ``(H(Y|X), H(Y|X,E), I(Y;E|X))`` for ``p[x, e, y]``.

    The mutual information is summed term by term rather than taken as the
    difference of the two entropies, so the identity between them is a
    genuine check. Zero-probability cells contribute nothing.
    """
    p = jd.table
    p_x = p.sum(axis=(1, 2))
    p_xe = p.sum(axis=2)
    p_xy = p.sum(axis=1)
    h_y_given_x = entropy(p_xy) - entropy(p_x)
    h_y_given_xe = entropy(p) - entropy(p_xe)

    mask = p > 0
    num = p * p_x[:, None, None]
    den = p_xe[:, :, None] * p_xy[:, None, :]
    cmi = float(np.sum(p[mask] * np.log(num[mask] / den[mask])))
    return h_y_given_x, h_y_given_xe, cmi
