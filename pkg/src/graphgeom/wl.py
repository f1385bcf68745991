"""1-WL colour refinement with edge attributes and positional initial colours."""

from __future__ import annotations

import json
import warnings
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from .curvature import EdgeScoreMap, forman_curvature
from .errors import ConfigurationError, InsufficientSpectrumError
from .graph import Graph, disjoint_union
from .spectral import CutoffEigengapWarning, lappe

__all__ = [
    "ColorPalette",
    "WLColoring",
    "PairResult",
    "MODES",
    "wl_refine",
    "common_neighbor_attribute",
    "pe_initial_colors",
    "refine_pair",
    "distinguish",
    "distinguish_detail",
    "load_pair_library",
]

MODES = ("plain", "curvature", "common-neighbor", "pe", "random-pe")
PE_DECIMALS = 6


class ColorPalette:
    """Injective map from refinement signatures to dense colour ids.

    Share one palette between graphs whose colourings are to be compared.
    """

    def __init__(self):
        self._ids = {}

    def __call__(self, signature) -> int:
        cid = self._ids.get(signature)
        if cid is None:
            cid = self._ids[signature] = len(self._ids)
        return cid

    def __len__(self):
        return len(self._ids)


@dataclass
class WLColoring:
    colors: np.ndarray
    iterations: int
    histogram: dict
    history: list = field(default_factory=list, repr=False)


def _num_classes(colors) -> int:
    return len(set(colors))


def _edge_lookup(g: Graph, edge_attrs: Optional[EdgeScoreMap]):
    if edge_attrs is None:
        return None
    edge_attrs.check_aligned(g)
    return {e: float(s) for e, s in zip(g.edge_index, edge_attrs.scores.tolist())}


def _refine_once(g: Graph, colors, attrs, palette):
    new = []
    for v, nbrs in enumerate(g.neighbors):
        if attrs is None:
            msg = tuple(sorted(colors[u] for u in nbrs))
        else:
            msg = tuple(sorted((colors[u], attrs[(min(u, v), max(u, v))]) for u in nbrs))
        new.append(palette(("wl", colors[v], msg)))
    return new


def wl_refine(g: Graph, init_colors=None, edge_attrs: Optional[EdgeScoreMap] = None,
              palette: Optional[ColorPalette] = None) -> WLColoring:
    """Refine until the colour partition stops changing.

    ``iterations`` counts refinement rounds including the one that showed
    stability, so a graph that is stable from the start reports 1.
    """
    palette = ColorPalette() if palette is None else palette
    if init_colors is None:
        init_colors = [0] * g.num_nodes
    if len(init_colors) != g.num_nodes:
        raise ConfigurationError("init_colors must have one entry per node")
    attrs = _edge_lookup(g, edge_attrs)
    colors = [palette(("init", c)) for c in init_colors]
    history = [colors]
    rounds = 0
    while True:
        rounds += 1
        new = _refine_once(g, colors, attrs, palette)
        history.append(new)
        stable = _num_classes(new) == _num_classes(colors)
        colors = new
        if stable or rounds > g.num_nodes:
            break
    return WLColoring(np.asarray(colors), rounds, dict(Counter(colors)), history)


def common_neighbor_attribute(g: Graph) -> EdgeScoreMap:
    """Number of common neighbours of the two endpoints of every edge."""
    nb = [set(x) for x in g.neighbors]
    return EdgeScoreMap([len(nb[u] & nb[v]) for u, v in g.edges.tolist()])


def pe_initial_colors(g: Graph, K: int, decimals: int = PE_DECIMALS):
    """Sorted multiset of squared LapPE distances from each node to all others.

    Distances are invariant to sign flips and rotations inside complete
    eigenvalue clusters, which the cutoff extension guarantees.
    Returns ``(colors, general_position)`` where the flag requires a clean
    cutoff and pairwise-distinct retained eigenvalues; degenerate spectra
    can give equal distance multisets on non-isomorphic graphs.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", CutoffEigengapWarning)
        pe = lappe(g, K)
    gap_ok = pe.eigengap_ok and pe.simple_spectrum and not caught
    p = pe.coordinates
    sq = np.sum(p ** 2, axis=1)
    dist = np.maximum(sq[:, None] + sq[None, :] - 2.0 * p @ p.T, 0.0)
    scale = 10.0 ** decimals
    colors = []
    for v in range(g.num_nodes):
        row = np.delete(dist[v], v)
        colors.append(tuple(sorted(np.rint(row * scale).astype(np.int64).tolist())))
    return colors, gap_ok


@dataclass
class PairResult:
    distinguished: bool
    first_difference_iteration: Optional[int]
    iterations: int
    eigengap_ok: bool = True
    mode: str = "plain"


def _hist(colors):
    return Counter(colors)


def refine_pair(g1: Graph, g2: Graph, init1=None, init2=None, attrs1=None, attrs2=None) -> PairResult:
    """Refine both graphs jointly (as a disjoint union) under one palette.

    ``first_difference_iteration`` is 0 when the initial colours already
    differ, otherwise the first round whose colour histograms differ.
    """
    n1, n2 = g1.num_nodes, g2.num_nodes
    union = disjoint_union(g1, g2)
    init1 = [0] * n1 if init1 is None else list(init1)
    init2 = [0] * n2 if init2 is None else list(init2)
    attrs = None
    if attrs1 is not None or attrs2 is not None:
        a1 = np.zeros(g1.num_edges) if attrs1 is None else attrs1.scores
        a2 = np.zeros(g2.num_edges) if attrs2 is None else attrs2.scores
        # disjoint_union keeps g1's edges first and g2's after, both in canonical order
        attrs = EdgeScoreMap(np.concatenate([a1, a2]))
    coloring = wl_refine(union, init1 + init2, attrs)
    first = None
    for t, cols in enumerate(coloring.history):
        if _hist(cols[:n1]) != _hist(cols[n1:]):
            first = t
            break
    return PairResult(first is not None, first, coloring.iterations)


def _mode_inputs(g: Graph, mode: str, K: int, seed: int):
    if mode == "plain":
        return None, None, True
    if mode == "curvature":
        return None, forman_curvature(g), True
    if mode == "common-neighbor":
        return None, common_neighbor_attribute(g), True
    if mode == "pe":
        try:
            colors, ok = pe_initial_colors(g, K)
        except InsufficientSpectrumError as exc:
            raise ConfigurationError(f"pe mode: {exc}") from exc
        return colors, None, ok
    if mode == "random-pe":
        rng = np.random.default_rng(seed)
        return np.round(rng.standard_normal(g.num_nodes), PE_DECIMALS).tolist(), None, True
    raise ConfigurationError(f"unknown WL mode {mode!r}; choose from {MODES}")


def distinguish_detail(g1: Graph, g2: Graph, mode: str = "plain", K: int = 8, seed: int = 0) -> PairResult:
    if g1.num_nodes != g2.num_nodes:
        return PairResult(True, 0, 0, True, mode)
    init1, attrs1, ok1 = _mode_inputs(g1, mode, K, seed)
    init2, attrs2, ok2 = _mode_inputs(g2, mode, K, seed + 1)
    res = refine_pair(g1, g2, init1, init2, attrs1, attrs2)
    res.eigengap_ok = ok1 and ok2
    res.mode = mode
    return res


def distinguish(g1: Graph, g2: Graph, mode: str = "plain", K: int = 8, seed: int = 0) -> bool:
    """True iff the stable WL colour histograms of the two graphs differ."""
    return distinguish_detail(g1, g2, mode, K, seed).distinguished


def load_pair_library():
    """Bundled 1-WL-equivalent pairs: list of dicts with name, graphs and pe_dims."""
    from .io import graph_from_dict

    root = resources.files("graphgeom") / "data" / "wl_pairs"
    index = json.loads((root / "index.json").read_text())
    pairs = []
    for entry in index["pairs"]:
        g1 = graph_from_dict(json.loads((root / entry["files"][0]).read_text())).graph
        g2 = graph_from_dict(json.loads((root / entry["files"][1]).read_text())).graph
        pairs.append({**entry, "graphs": (g1, g2)})
    return pairs
