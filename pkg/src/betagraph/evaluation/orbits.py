"""Per-node counts of the 15 orbits of connected graphlets on 2-4 nodes.

Orbit numbering (per node role):

    0        edge endpoint
    1, 2     3-path end, middle
    3        triangle
    4, 5     4-path end, middle
    6, 7     3-star leaf, centre
    8        4-cycle
    9-11     paw: pendant, degree-2 triangle node, degree-3 node
    12, 13   diamond: degree-2, degree-3
    14       4-clique

Connected induced 3- and 4-node subgraphs are enumerated once each with the
ESU scheme and classified by their internal degree sequence.
"""

from __future__ import annotations

import numpy as np

from ..graph import Graph

N_ORBITS = 15

# (edge count, sorted degree sequence) -> {internal degree: orbit}
_FOUR = {
    (3, (1, 1, 2, 2)): {1: 4, 2: 5},
    (3, (1, 1, 1, 3)): {1: 6, 3: 7},
    (4, (2, 2, 2, 2)): {2: 8},
    (4, (1, 2, 2, 3)): {1: 9, 2: 10, 3: 11},
    (5, (2, 2, 3, 3)): {2: 12, 3: 13},
    (6, (3, 3, 3, 3)): {3: 14},
}


def _classify(nodes, adj, counts):
    deg = {u: sum(1 for v in nodes if v in adj[u]) for u in nodes}
    m = sum(deg.values()) // 2
    if len(nodes) == 3:
        if m == 3:
            for u in nodes:
                counts[u, 3] += 1
        else:
            for u in nodes:
                counts[u, 1 if deg[u] == 1 else 2] += 1
        return
    table = _FOUR[(m, tuple(sorted(deg.values())))]
    for u in nodes:
        counts[u, table[deg[u]]] += 1


def orbit_counts(graph: Graph) -> np.ndarray:
    """Integer array of shape ``(N, 15)``."""
    n = graph.n
    adj = [set(np.flatnonzero(graph.adjacency[u]).tolist()) for u in range(n)]
    counts = np.zeros((n, N_ORBITS), dtype=np.int64)
    counts[:, 0] = graph.degrees

    def extend(sub, ext, root, nbhd):
        if len(sub) >= 3:
            _classify(sub, adj, counts)
        if len(sub) == 4:
            return
        ext = list(ext)
        while ext:
            w = ext.pop()
            # exclusive neighbours of w: larger than root, not in or next to sub
            new = [u for u in adj[w] if u > root and u not in nbhd]
            extend(sub + [w], ext + new, root, nbhd | adj[w] | {w})

    for v in range(n):
        extend([v], [u for u in adj[v] if u > v], v, adj[v] | {v})
    return counts
