"""Line-delimited JSON storage for graph collections.

One graph per line: ``{"edges": [[u, v], ...], "features": [[...], ...], "n": N}``
with ``u < v``, 0-based indices and sorted keys. ``features`` is omitted when
the graph has no feature columns.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ContractError, ParseError
from .graph import Graph


def graph_to_record(graph: Graph) -> dict:
    rec = {"n": graph.n, "edges": [[u, v] for u, v in graph.edges()]}
    if graph.features.shape[1]:
        rec["features"] = graph.features.tolist()
    return rec


def dumps_graph(graph: Graph) -> str:
    return json.dumps(graph_to_record(graph), sort_keys=True, separators=(",", ":"))


def record_to_graph(rec: dict, line: int | None = None) -> Graph:
    if not isinstance(rec, dict) or "n" not in rec or "edges" not in rec:
        raise ParseError("record must be an object with 'n' and 'edges'", line)
    n = rec["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"'n' must be a positive integer, got {n!r}", line)
    a = np.zeros((n, n), dtype=np.uint8)
    for e in rec["edges"]:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(i, int) for i in e)):
            raise ParseError(f"malformed edge {e!r}", line)
        u, v = e
        if not 0 <= u < v < n:
            raise ParseError(f"edge {e!r} breaks 0 <= u < v < n (asymmetric or self-loop)", line)
        if a[u, v]:
            raise ParseError(f"duplicate edge {e!r}", line)
        a[u, v] = a[v, u] = 1
    feats = rec.get("features")
    if feats is not None:
        try:
            feats = np.asarray(feats, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad features: {exc}", line) from None
        if feats.ndim != 2:
            raise ParseError("features must be a list of rows", line)
    try:
        return Graph(a, feats)
    except ContractError as exc:
        raise ParseError(str(exc), line) from None


def save_graphs(graphs: Iterable[Graph], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for g in graphs:
            fh.write(dumps_graph(g))
            fh.write("\n")


def load_graphs(path) -> list[Graph]:
    graphs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, text in enumerate(fh, start=1):
            if not text.strip():
                continue
            try:
                rec = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", lineno) from None
            graphs.append(record_to_graph(rec, lineno))
    return graphs
