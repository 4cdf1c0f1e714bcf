"""JSON / JSONL / CSV formats shared by the command-line tools."""
from __future__ import annotations

import csv
import json
import math
from collections import deque
from pathlib import Path

import numpy as np

from .coloring import EdgeColoring
from .errors import TreembedError, ValidationError
from .graphs import FiniteMetricSpace, WeightedGraph, WeightedRootedTree, metric_of


class ParseError(TreembedError):
    """Input file is unreadable or not in the expected format."""


def _clean(obj):
    if isinstance(obj, float):
        return None if math.isnan(obj) or math.isinf(obj) else obj
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, allow_nan=False) + "\n"


def read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

def tree_to_json(tree: WeightedRootedTree, meta: dict | None = None) -> dict:
    out = {"kind": "tree", "n": tree.n, "root": tree.root, "edges": [[u, v, w] for u, v, w in tree.edges()]}
    if meta:
        out["meta"] = meta
    return out


def graph_to_json(graph: WeightedGraph, meta: dict | None = None) -> dict:
    out = {"kind": "graph", "n": graph.n, "root": graph.marks.get("r", 0),
           "edges": [[int(u), int(v), float(w)] for u, v, w in graph.edges]}
    if graph.marks:
        out["marks"] = {k: int(v) for k, v in graph.marks.items()}
    if meta:
        out["meta"] = meta
    return out


def _edges(obj):
    try:
        n = int(obj["n"])
        edges = [(int(u), int(v), float(w)) for u, v, w in obj["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed graph object: {exc}") from exc
    return n, edges


def tree_from_edges(n: int, root: int, edges) -> WeightedRootedTree:
    if len(edges) != n - 1:
        raise ValidationError(f"a tree on {n} vertices needs {n - 1} edges, got {len(edges)}")
    adj = [[] for _ in range(n)]
    for u, v, w in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"edge ({u}, {v}) out of range")
        adj[u].append((v, w))
        adj[v].append((u, w))
    parent = np.full(n, -1, dtype=np.int64)
    weight = np.zeros(n)
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v, w in adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                weight[v] = w
                queue.append(v)
    if not seen.all():
        raise ValidationError("edges do not form a connected tree")
    return WeightedRootedTree(parent, weight, root)


def graph_from_json(obj):
    if not isinstance(obj, dict) or obj.get("kind") not in ("tree", "graph"):
        raise ParseError('graph file must be an object with "kind" "tree" or "graph"')
    n, edges = _edges(obj)
    if obj["kind"] == "tree":
        return tree_from_edges(n, int(obj.get("root", 0)), edges)
    marks = {k: int(v) for k, v in obj.get("marks", {}).items()}
    return WeightedGraph(n=n, edges=tuple(edges), marks=marks)


def load_graph(path):
    return graph_from_json(read_json(path))


def load_tree(path) -> WeightedRootedTree:
    g = load_graph(path)
    if not isinstance(g, WeightedRootedTree):
        raise ParseError(f"{path}: expected a tree")
    return g


# ---------------------------------------------------------------------------
# metrics and maps
# ---------------------------------------------------------------------------

def metric_to_json(space: FiniteMetricSpace) -> dict:
    return {"kind": "metric", "n": space.n, "dist": space.dist.tolist()}


def load_space(path) -> FiniteMetricSpace:
    """Metric file, or a graph file whose shortest-path metric is used."""
    obj = read_json(path)
    if isinstance(obj, dict) and obj.get("kind") == "metric":
        try:
            d = np.array(obj["dist"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: malformed metric: {exc}") from exc
        return FiniteMetricSpace(d)
    return metric_of(graph_from_json(obj))


def load_map(path):
    """Map file: {"source": file, "target": file, "assign": [...]}.

    Paths are resolved relative to the map file.  Returns (source_obj_path,
    target_obj_path, assign).
    """
    obj = read_json(path)
    base = Path(path).parent
    try:
        src, tgt = base / obj["source"], base / obj["target"]
        assign = [int(a) for a in obj["assign"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed map: {exc}") from exc
    return src, tgt, assign


# ---------------------------------------------------------------------------
# colourings and point sets
# ---------------------------------------------------------------------------

def load_coloring(path, tree: WeightedRootedTree) -> EdgeColoring:
    arr = read_json(path)
    if not isinstance(arr, list) or len(arr) != tree.n:
        raise ParseError(f"{path}: expected a colour array of length {tree.n}")
    try:
        color = [-1 if c is None else int(c) for c in arr]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: colour ids must be integers") from exc
    return EdgeColoring(tree, np.array(color))


def points_to_jsonl(points) -> str:
    return "".join(json.dumps(rec) + "\n" for rec in points.jsonl_records())


def ratio_table_csv(rho: np.ndarray, lp: np.ndarray, path) -> None:
    n = rho.shape[0]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "rho", "lp", "ratio"])
        for x in range(n):
            for y in range(x + 1, n):
                w.writerow([x, y, repr(float(rho[x, y])), repr(float(lp[x, y])), repr(float(lp[x, y] / rho[x, y]))])
