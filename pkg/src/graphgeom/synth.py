"""Seeded synthetic labeled graphs from a class-pair edge-probability table.

PRNG contract: numpy's ``PCG64`` bit generator, seeded through
``numpy.random.default_rng([seed, stream])`` with stream 0 for edges and
stream 1 for features. Statistics (not bit streams) are the portable
guarantee across implementations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import GraphInputError
from .graph import Graph, LabeledGraph, build_graph

__all__ = [
    "GeneratorSpec",
    "generate",
    "gaussian_features",
    "uniform_table",
    "assortative_table",
    "pairing_table",
    "cyclic_table",
    "random_regular_graph",
    "erdos_renyi",
]

EDGE_STREAM = 0
FEATURE_STREAM = 1


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """Block sizes, symmetric class-pair probability table and feature settings.

    ``feature_groups`` maps each class to a mean direction; classes sharing
    a group get identical feature means. ``None`` gives every class its own.
    """

    nodes_per_class: Sequence[int]
    table: np.ndarray
    feature_dim: int = 0
    snr: float = 1.0
    seed: int = 0
    feature_groups: Optional[Sequence[int]] = None

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.nodes_per_class)
        t = np.asarray(self.table, dtype=np.float64)
        c = len(sizes)
        if t.shape != (c, c):
            raise GraphInputError(f"table must be {c}x{c}, got {t.shape}")
        if np.any(t < 0) or np.any(t > 1):
            raise GraphInputError("edge probabilities must lie in [0, 1]")
        if not np.allclose(t, t.T, rtol=0, atol=0):
            raise GraphInputError("edge-probability table must be symmetric")
        if any(s < 1 for s in sizes):
            raise GraphInputError("every class needs at least one node")
        if self.snr < 0:
            raise GraphInputError("snr must be nonnegative")
        if self.feature_groups is not None and len(self.feature_groups) != c:
            raise GraphInputError("feature_groups needs one entry per class")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "nodes_per_class", sizes)
        object.__setattr__(self, "table", t)

    @property
    def num_classes(self):
        return len(self.nodes_per_class)

    @property
    def num_nodes(self):
        return sum(self.nodes_per_class)


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), stream])


def generate(spec: GeneratorSpec) -> LabeledGraph:
    """Sample every pair ``u < v`` independently with ``table[y_u, y_v]``.

    Nodes are laid out in class blocks: the first ``nodes_per_class[0]``
    nodes are class 0, and so on.
    """
    labels = np.repeat(np.arange(spec.num_classes), spec.nodes_per_class)
    n = len(labels)
    rng = _rng(spec.seed, EDGE_STREAM)
    iu, iv = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < spec.table[labels[iu], labels[iv]]
    g = build_graph(n, np.stack([iu[keep], iv[keep]], axis=1))
    feats = None
    if spec.feature_dim > 0:
        feats = gaussian_features(labels, spec.feature_dim, spec.snr, spec.seed,
                                  groups=spec.feature_groups)
    return LabeledGraph(g, labels, feats)


def _mean_directions(num_groups: int, d: int, seed: int) -> np.ndarray:
    if d >= num_groups:
        return np.eye(d)[:num_groups]
    # not enough room for orthogonal means: seeded random unit vectors
    v = _rng(seed, FEATURE_STREAM + 1).standard_normal((num_groups, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def gaussian_features(labels, d: int, snr: float, seed: int, groups=None) -> np.ndarray:
    """Row ``v`` is ``snr * u_{g(y_v)}`` plus standard normal noise.

    ``u_k`` are orthonormal coordinate directions when ``d`` allows.
    """
    if d < 1:
        raise GraphInputError("feature dimension must be at least 1")
    if snr < 0:
        raise GraphInputError("snr must be nonnegative")
    y = np.asarray(labels, dtype=np.int64)
    c = int(y.max()) + 1 if len(y) else 0
    grp = np.arange(c) if groups is None else np.asarray(groups, dtype=np.int64)
    means = snr * _mean_directions(int(grp.max()) + 1 if c else 0, d, seed)
    noise = _rng(seed, FEATURE_STREAM).standard_normal((len(y), d))
    return means[grp[y]] + noise if c else noise


def uniform_table(c: int, p: float) -> np.ndarray:
    return np.full((c, c), float(p))


def assortative_table(c: int, p_in: float, p_out: float) -> np.ndarray:
    t = np.full((c, c), float(p_out))
    np.fill_diagonal(t, p_in)
    return t


def pairing_table(c: int, p: float, p_cross: float = 0.0) -> np.ndarray:
    """Class ``y`` links only to class ``y ^ 1`` (an involution; ``c`` even).

    A neighbour's class then determines the node's class exactly.
    ``p_cross`` optionally links every other class pair.
    """
    if c % 2:
        raise GraphInputError("pairing table needs an even class count")
    t = np.full((c, c), float(p_cross))
    for y in range(c):
        t[y, y ^ 1] = p
    np.fill_diagonal(t, p_cross)
    return t


def cyclic_table(c: int, p: float) -> np.ndarray:
    """Symmetric closure of ``y -> y + 1 mod c``.

    For ``c >= 3`` each class touches two others, so the neighbour class is
    no longer determined by the node class.
    """
    t = np.zeros((c, c))
    for y in range(c):
        t[y, (y + 1) % c] = p
        t[(y + 1) % c, y] = p
    return t


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    rng = _rng(seed, EDGE_STREAM)
    iu, iv = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    return build_graph(n, np.stack([iu[keep], iv[keep]], axis=1))


def random_regular_graph(n: int, d: int, seed: int, max_tries: int = 10000) -> Graph:
    """Uniform-ish simple ``d``-regular graph by configuration-model rejection."""
    if n * d % 2 or d >= n:
        raise GraphInputError(f"no simple {d}-regular graph on {n} nodes")
    rng = _rng(seed, EDGE_STREAM)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        perm = rng.permutation(stubs).reshape(-1, 2)
        if np.any(perm[:, 0] == perm[:, 1]):
            continue
        pairs = np.sort(perm, axis=1)
        if len(np.unique(pairs, axis=0)) == len(pairs):
            return build_graph(n, pairs)
    raise GraphInputError(f"failed to sample a simple {d}-regular graph on {n} nodes")
