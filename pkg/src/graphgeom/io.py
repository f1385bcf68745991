"""Graph, joint-distribution and report files.

Graph JSON: ``{"num_nodes": n, "edges": [[u, v], ...], "labels": [...],
"features": [[...], ...]}`` with labels and features optional. Edge-list
text: one ``u<TAB>v`` per line (``#`` comments allowed) with labels in an
optional sidecar holding either one label per line or ``node<TAB>label``.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__
from .errors import GraphInputError
from .graph import Graph, LabeledGraph, build_graph
from .metrics import JointDistribution

__all__ = [
    "graph_to_dict",
    "graph_from_dict",
    "dumps_graph",
    "loads_graph",
    "read_graph",
    "write_graph",
    "read_edge_list",
    "read_joint",
    "digest",
    "make_report",
    "dumps_report",
]


def _remap_labels(raw):
    values = list(raw)
    if all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in values):
        uniq = sorted(set(int(v) for v in values))
        if uniq == list(range(len(uniq))):
            return np.asarray(values, dtype=np.int64)
    keys = sorted(set(values), key=lambda v: (str(type(v)), v))
    index = {k: i for i, k in enumerate(keys)}
    return np.asarray([index[v] for v in values], dtype=np.int64)


def graph_to_dict(lg) -> dict:
    if isinstance(lg, Graph):
        lg = LabeledGraph(lg)
    d = {"num_nodes": lg.graph.num_nodes, "edges": lg.graph.edges.tolist()}
    if lg.labels is not None:
        d["labels"] = lg.labels.tolist()
    if lg.features is not None:
        d["features"] = lg.features.tolist()
    return d


def graph_from_dict(d: dict) -> LabeledGraph:
    if not isinstance(d, dict) or "num_nodes" not in d or "edges" not in d:
        raise GraphInputError("graph JSON needs 'num_nodes' and 'edges'")
    try:
        n = int(d["num_nodes"])
        edges = [tuple(int(x) for x in e) for e in d["edges"]]
    except (TypeError, ValueError) as exc:
        raise GraphInputError(f"malformed graph JSON: {exc}") from exc
    if any(len(e) != 2 for e in edges):
        raise GraphInputError("every edge must be a pair")
    g = build_graph(n, edges)
    labels = d.get("labels")
    if labels is not None:
        if len(labels) != n:
            raise GraphInputError(f"labels must have length {n}")
        labels = _remap_labels(labels)
    feats = d.get("features")
    if feats is not None:
        feats = np.asarray(feats, dtype=np.float64)
    return LabeledGraph(g, labels, feats)


def dumps_graph(lg) -> str:
    """Canonical compact JSON; byte-identical for equal graphs."""
    return json.dumps(graph_to_dict(lg), separators=(",", ":")) + "\n"


def loads_graph(text: str) -> LabeledGraph:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphInputError(f"invalid JSON: {exc}") from exc
    return graph_from_dict(d)


def _is_int(tok: str) -> bool:
    return tok.lstrip("-").isdigit()


def _rows(path):
    return [ln.split() for ln in Path(path).read_text().splitlines()
            if ln.strip() and not ln.lstrip().startswith("#")]


def read_edge_list(path, labels_path=None, num_nodes=None) -> LabeledGraph:
    """Parse ``u<TAB>v`` lines; non-integer ids are remapped by first appearance."""
    pairs = _rows(path)
    for lineno, p in enumerate(pairs, 1):
        if len(p) != 2:
            raise GraphInputError(f"{path}: edge line {lineno} needs exactly two node ids")
    label_rows = _rows(labels_path) if labels_path is not None else []
    keyed = bool(label_rows) and all(len(r) == 2 for r in label_rows)
    tokens = [t for p in pairs for t in p] + ([r[0] for r in label_rows] if keyed else [])
    if all(_is_int(t) for t in tokens):
        ids = {t: int(t) for t in tokens}
    else:
        ids = {}
        for t in tokens:
            ids.setdefault(t, len(ids))
    n = max(ids.values()) + 1 if ids else 0
    labels = None
    if label_rows:
        if keyed:
            raw = [None] * n
            for node, lab in label_rows:
                raw[ids[node]] = int(lab) if _is_int(lab) else lab
            if any(r is None for r in raw):
                raise GraphInputError("labels sidecar does not cover every node")
        else:
            raw = [int(r[0]) if _is_int(r[0]) else r[0] for r in label_rows]
            n = max(n, len(raw))
        labels = _remap_labels(raw)
    if num_nodes is not None:
        n = int(num_nodes)
    g = build_graph(n, [(ids[a], ids[b]) for a, b in pairs])
    return LabeledGraph(g, labels)


def read_graph(path, labels_path=None) -> LabeledGraph:
    path = Path(path)
    try:
        if path.suffix.lower() == ".json":
            return loads_graph(path.read_text())
        return read_edge_list(path, labels_path)
    except OSError as exc:
        raise GraphInputError(f"cannot read {path}: {exc}") from exc


def write_graph(lg, path):
    Path(path).write_text(dumps_graph(lg))


def read_joint(path) -> JointDistribution:
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphInputError(f"cannot read joint distribution {path}: {exc}") from exc
    table = d["table"] if isinstance(d, dict) else d
    return JointDistribution(np.asarray(table, dtype=np.float64))


def digest(*texts: str) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode())
        h.update(b"\0")
    return "sha256:" + h.hexdigest()


def make_report(command: str, config: dict, payload: dict, checks=None, inputs=()) -> dict:
    """Assemble a report; each check is a dict with ``name``, ``passed`` and ``tolerance``."""
    checks = list(checks or [])
    return {
        "tool": "graphgeom",
        "version": __version__,
        "command": command,
        "input_digest": digest(*inputs),
        "config": config,
        "payload": payload,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, default=_default) + "\n"
