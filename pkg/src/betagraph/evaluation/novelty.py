"""Uniqueness and novelty up to isomorphism."""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

import networkx as nx

from ..errors import ContractError
from ..graph import Graph


def wl_hash(graph: Graph, iterations: int = 3) -> str:
    return nx.weisfeiler_lehman_graph_hash(graph.to_networkx(), iterations=iterations)


class IsomorphismIndex:
    """Hash buckets of graphs with exact isomorphism checks inside a bucket."""

    def __init__(self, graphs: Sequence[Graph] = ()):
        self._buckets: dict[str, list] = defaultdict(list)
        for g in graphs:
            self.add(g)

    def _key(self, graph: Graph) -> str:
        return f"{graph.n}:{graph.n_edges}:{wl_hash(graph)}"

    def contains(self, graph: Graph) -> bool:
        nxg = graph.to_networkx()
        return any(nx.is_isomorphic(nxg, other) for other in self._buckets.get(self._key(graph), ()))

    def add(self, graph: Graph) -> None:
        self._buckets[self._key(graph)].append(graph.to_networkx())


def uniqueness_novelty(generated: Sequence[Graph], training: Sequence[Graph]) -> tuple[float, float]:
    """Fraction not isomorphic to an earlier generated graph, and fraction not
    isomorphic to any training graph."""
    if not generated:
        raise ContractError("uniqueness_novelty needs at least one generated graph")
    seen = IsomorphismIndex()
    unique = 0
    for g in generated:
        if not seen.contains(g):
            unique += 1
            seen.add(g)
    train_index = IsomorphismIndex(training)
    novel = sum(not train_index.contains(g) for g in generated)
    return unique / len(generated), novel / len(generated)


def unique_novel_mask(generated: Sequence[Graph], training: Sequence[Graph]) -> list[tuple[bool, bool]]:
    seen = IsomorphismIndex()
    train_index = IsomorphismIndex(training)
    out = []
    for g in generated:
        u = not seen.contains(g)
        if u:
            seen.add(g)
        out.append((u, not train_index.contains(g)))
    return out
