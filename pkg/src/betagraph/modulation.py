"""Centrality-driven concentration modulation.

Structurally important nodes (and edges touching them) receive larger
concentration values so they persist longer in the forward process and
settle earlier in the reverse process.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ConfigurationError
from .graph import Graph
from .state import ConcentrationField

DEFAULT_LEVELS = (10000.0, 100.0, 30.0, 10.0)
DEFAULT_THRESHOLDS = (1.0, 0.8, 0.4, 0.1)


@dataclass(frozen=True)
class ModulationStrategy:
    kind: Literal["none", "degree", "betweenness"] = "none"
    levels: tuple[float, ...] = DEFAULT_LEVELS
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    default_eta: float = 30.0

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))
        object.__setattr__(self, "thresholds", tuple(float(v) for v in self.thresholds))
        if self.kind not in ("none", "degree", "betweenness"):
            raise ConfigurationError(f"unknown modulation kind {self.kind!r}")
        if len(self.levels) != len(self.thresholds) or not self.levels:
            raise ConfigurationError("levels and thresholds must have the same, nonzero length")
        if any(v <= 0 for v in self.levels) or self.default_eta <= 0:
            raise ConfigurationError("concentration levels must be > 0")
        th = self.thresholds
        if any(not 0 < v <= 1 for v in th) or any(a <= b for a, b in zip(th, th[1:])):
            raise ConfigurationError("thresholds must be strictly decreasing in (0, 1]")

    def etas(self) -> tuple[float, ...]:
        """Every concentration value this strategy can emit."""
        if self.kind == "none":
            return (float(self.default_eta),)
        return tuple(sorted(set(self.levels)))

    def level_of(self, c) -> np.ndarray:
        """Map normalized centrality in [0, 1] to a concentration level.

        Interval ``i`` is ``(thresholds[i+1], thresholds[i]]``; the last one
        also includes everything down to 0.
        """
        c = np.asarray(c, dtype=np.float64)
        th = np.asarray(self.thresholds)
        # number of thresholds strictly below c, counted from the top
        idx = np.sum(c[..., None] <= th, axis=-1) - 1
        idx = np.clip(idx, 0, len(th) - 1)
        return np.asarray(self.levels)[idx]


def degree_centrality(graph: Graph) -> np.ndarray:
    """Node degrees (unnormalized)."""
    return graph.adjacency.sum(axis=1).astype(np.float64)


def betweenness_centrality(graph: Graph) -> np.ndarray:
    """Exact unnormalized betweenness over unordered (s, t) pairs.

    Brandes' accumulation over unweighted BFS trees; disconnected pairs
    contribute nothing.
    """
    n = graph.n
    nbrs = [np.flatnonzero(row).tolist() for row in graph.adjacency]
    cb = np.zeros(n)
    for s in range(n):
        order = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in nbrs[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                cb[w] += delta[w]
    # every unordered pair was visited from both endpoints
    return cb / 2.0


def normalized_centrality(graph: Graph, kind: str) -> np.ndarray:
    """Centrality divided by its maximum within the graph (zeros if all zero)."""
    if kind == "degree":
        c = degree_centrality(graph)
    elif kind == "betweenness":
        c = betweenness_centrality(graph)
    else:
        raise ConfigurationError(f"no centrality for kind {kind!r}")
    top = c.max()
    return c / top if top > 0 else np.zeros_like(c)


def assign_eta(graph: Graph, strategy: ModulationStrategy) -> ConcentrationField:
    n = graph.n
    if strategy.kind == "none":
        return ConcentrationField.constant(n, strategy.default_eta)
    c = normalized_centrality(graph, strategy.kind)
    edge_c = np.maximum(c[:, None], c[None, :])
    return ConcentrationField(strategy.level_of(edge_c), strategy.level_of(c))
