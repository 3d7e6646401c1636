"""Dataset-specific validity tests."""

from __future__ import annotations

import networkx as nx
from networkx.algorithms.community import greedy_modularity_communities

from ..errors import ConfigurationError
from ..graph import Graph

# flag recorded next to SBM validity numbers in every report
SBM_FLAG = "modularity-approximation"
SUPPORTED = ("planar", "sbm")


def is_valid_planar(graph: Graph) -> bool:
    g = graph.to_networkx()
    if g.number_of_nodes() == 0 or not nx.is_connected(g):
        return False
    planar, _ = nx.check_planarity(g)
    return bool(planar)


def is_valid_sbm(graph: Graph, n_min=2, n_max=5, size_min=20, size_max=40) -> bool:
    """Greedy modularity partition with 2-5 blocks of 20-40 nodes each."""
    g = graph.to_networkx()
    if g.number_of_edges() == 0:
        return False
    blocks = greedy_modularity_communities(g)
    sizes = [len(c) for c in blocks]
    return n_min <= len(sizes) <= n_max and all(size_min <= s <= size_max for s in sizes)


def validity(graph: Graph, dataset_kind: str) -> bool:
    if dataset_kind == "planar":
        return is_valid_planar(graph)
    if dataset_kind == "sbm":
        return is_valid_sbm(graph)
    raise ConfigurationError(f"no validity test for {dataset_kind!r}; supported: {SUPPORTED}")
