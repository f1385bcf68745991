"""Canonical undirected simple graphs.

A :class:`Graph` stores its edges as a sorted ``(m, 2)`` integer array of
pairs ``(u, v)`` with ``u < v``. Every constructor path funnels through the
same canonical form, so two graphs with the same edge set compare equal and
serialize to identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import GraphInputError

__all__ = [
    "Graph",
    "LabeledGraph",
    "build_graph",
    "degrees",
    "symmetric_difference_count",
    "adjacency_matrix",
    "disjoint_union",
    "relabel",
    "complete_graph",
    "cycle_graph",
    "path_graph",
    "star_graph",
    "empty_graph",
    "complete_bipartite_graph",
]


def _as_edge_array(edges) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GraphInputError(f"edges must be a sequence of pairs, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on nodes ``0..num_nodes-1``.

    Instances are immutable. Use :func:`build_graph` to canonicalize raw
    edge lists; the constructor itself only validates.
    """

    num_nodes: int
    edges: np.ndarray

    def __post_init__(self):
        n = int(self.num_nodes)
        if n < 0:
            raise GraphInputError(f"num_nodes must be nonnegative, got {n}")
        arr = _as_edge_array(self.edges).copy()
        if len(arr):
            if arr.min() < 0 or arr.max() >= n:
                raise GraphInputError("edge endpoint out of range")
            if np.any(arr[:, 0] >= arr[:, 1]):
                raise GraphInputError("edges must satisfy u < v (no self-loops)")
            keys = arr[:, 0] * n + arr[:, 1]
            if np.any(np.diff(keys) <= 0):
                raise GraphInputError("edges must be sorted and unique")
        arr.setflags(write=False)
        object.__setattr__(self, "num_nodes", n)
        object.__setattr__(self, "edges", arr)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def __len__(self):
        return self.num_nodes

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.num_nodes == other.num_nodes and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.num_nodes, self.edges.tobytes()))

    def __repr__(self):
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"

    @cached_property
    def degree_array(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.num_nodes).astype(np.int64)
        deg.setflags(write=False)
        return deg

    @cached_property
    def neighbors(self) -> tuple:
        """Sorted neighbor tuples, one per node."""
        nbrs = [[] for _ in range(self.num_nodes)]
        for u, v in self.edges.tolist():
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    @cached_property
    def edge_index(self) -> dict:
        """Map ``(u, v)`` with ``u < v`` to the row of :attr:`edges`."""
        return {(u, v): i for i, (u, v) in enumerate(self.edges.tolist())}

    def edge_set(self) -> frozenset:
        return frozenset(map(tuple, self.edges.tolist()))

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.edge_index


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """A graph with optional class labels and node features."""

    graph: Graph
    labels: Optional[np.ndarray] = None
    features: Optional[np.ndarray] = None

    def __post_init__(self):
        n = self.graph.num_nodes
        if self.labels is not None:
            y = np.asarray(self.labels)
            if y.ndim != 1 or len(y) != n:
                raise GraphInputError(f"labels must have length {n}, got shape {y.shape}")
            if len(y) and not np.issubdtype(y.dtype, np.integer):
                if not np.all(np.equal(np.mod(y, 1), 0)):
                    raise GraphInputError("labels must be integer class ids")
            y = y.astype(np.int64)
            if len(y):
                present = np.unique(y)
                if present[0] != 0 or present[-1] != len(present) - 1:
                    raise GraphInputError("class ids must be contiguous from 0")
            y.setflags(write=False)
            object.__setattr__(self, "labels", y)
        if self.features is not None:
            x = np.asarray(self.features, dtype=np.float64)
            if x.ndim == 1:
                x = x[:, None]
            if x.ndim != 2 or x.shape[0] != n:
                raise GraphInputError(f"features must have {n} rows, got shape {x.shape}")
            x.setflags(write=False)
            object.__setattr__(self, "features", x)

    @property
    def num_classes(self) -> int:
        if self.labels is None or len(self.labels) == 0:
            return 0
        return int(self.labels.max()) + 1

    def __eq__(self, other):
        if not isinstance(other, LabeledGraph):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return a.shape == b.shape and np.array_equal(a, b)

        return (self.graph == other.graph and same(self.labels, other.labels)
                and same(self.features, other.features))

    __hash__ = None


def build_graph(num_nodes: int, raw_edges: Iterable[Sequence[int]]) -> Graph:
    """Symmetrize, drop self-loops and coalesce duplicate edges.

    >>> build_graph(4, [(3, 1), (1, 3), (2, 0)]).edges.tolist()
    [[0, 2], [1, 3]]
    """
    n = int(num_nodes)
    if n < 0:
        raise GraphInputError(f"num_nodes must be nonnegative, got {n}")
    arr = _as_edge_array(list(raw_edges) if not isinstance(raw_edges, np.ndarray) else raw_edges)
    if len(arr) and (arr.min() < 0 or arr.max() >= n):
        bad = arr[(arr < 0).any(axis=1) | (arr >= n).any(axis=1)][0].tolist()
        raise GraphInputError(f"edge endpoint out of range for {n} nodes: {bad}")
    arr = np.sort(arr, axis=1)
    arr = arr[arr[:, 0] != arr[:, 1]]
    if len(arr):
        arr = np.unique(arr, axis=0)
    return Graph(n, arr)


def degrees(g: Graph) -> np.ndarray:
    """Node degrees; sums to twice the edge count."""
    return np.array(g.degree_array)


def symmetric_difference_count(g1: Graph, g2: Graph) -> int:
    """Number of undirected edges present in exactly one of the two graphs."""
    if g1.num_nodes != g2.num_nodes:
        raise GraphInputError(
            f"node-count mismatch: {g1.num_nodes} vs {g2.num_nodes}")
    return len(g1.edge_set() ^ g2.edge_set())


def adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.num_nodes, g.num_nodes))
    if g.num_edges:
        u, v = g.edges[:, 0], g.edges[:, 1]
        a[u, v] = 1.0
        a[v, u] = 1.0
    return a


def disjoint_union(*graphs: Graph) -> Graph:
    offset = 0
    parts = []
    for g in graphs:
        parts.append(g.edges + offset)
        offset += g.num_nodes
    edges = np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)
    return build_graph(offset, edges)


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Return the isomorphic graph with node ``v`` renamed to ``perm[v]``."""
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(g.num_nodes)):
        raise GraphInputError("perm must be a permutation of the node ids")
    return build_graph(g.num_nodes, perm[g.edges] if g.num_edges else [])


# small fixtures used throughout tests and the WL pair library

def empty_graph(n: int) -> Graph:
    return build_graph(n, [])


def complete_graph(n: int) -> Graph:
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    """Star with center 0 and ``leaves`` leaves."""
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return build_graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])
