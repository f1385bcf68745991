"""Regenerate the bundled 1-WL-equivalent pair library.

Every pair consists of two regular graphs with equal node count and degree,
so plain 1-WL gives both a single colour class. Random pairs are rejected
until non-isomorphic (checked with networkx, a dev-only dependency).
"""

import json
import warnings
from pathlib import Path

import networkx as nx

from graphgeom.graph import cycle_graph, disjoint_union
from graphgeom.io import dumps_graph
from graphgeom.spectral import CutoffEigengapWarning, lappe
from graphgeom.synth import random_regular_graph

OUT = Path(__file__).resolve().parents[1] / "src" / "graphgeom" / "data" / "wl_pairs"


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.num_nodes))
    h.add_edges_from(g.edges.tolist())
    return h


def clean_k(g1, g2, candidates=range(2, 9)):
    """Smallest LapPE width whose cutoff falls in a spectral gap on both graphs."""
    for k in candidates:
        ok = True
        for g in (g1, g2):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", CutoffEigengapWarning)
                try:
                    ok &= lappe(g, k).eigengap_ok
                except Exception:
                    ok = False
        if ok:
            return k
    return None


def main():
    pairs = [
        ("c6_vs_2c3", cycle_graph(6), disjoint_union(cycle_graph(3), cycle_graph(3)), True),
        ("c8_vs_2c4", cycle_graph(8), disjoint_union(cycle_graph(4), cycle_graph(4)), False),
        ("c8_vs_c3c5", cycle_graph(8), disjoint_union(cycle_graph(3), cycle_graph(5)), True),
    ]
    for n, d, seed in [(10, 3, 1), (12, 3, 2), (12, 4, 3), (14, 3, 4)]:
        g1 = random_regular_graph(n, d, seed)
        s = seed * 100
        while True:
            s += 1
            g2 = random_regular_graph(n, d, s)
            if not nx.is_isomorphic(to_nx(g1), to_nx(g2)):
                break
        pairs.append((f"rr{d}_n{n}", g1, g2, None))

    OUT.mkdir(parents=True, exist_ok=True)
    index = []
    for name, g1, g2, triangle_pair in pairs:
        files = [f"{name}_a.json", f"{name}_b.json"]
        (OUT / files[0]).write_text(dumps_graph(g1))
        (OUT / files[1]).write_text(dumps_graph(g2))
        index.append({"name": name, "files": files, "pe_dims": clean_k(g1, g2),
                      "triangle_pair": triangle_pair})
    (OUT / "index.json").write_text(json.dumps({"pairs": index}, indent=2) + "\n")
    for e in index:
        print(e)


if __name__ == "__main__":
    main()
