"""Per-graph summary statistics compared by MMD."""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

from ..errors import ConfigurationError
from ..graph import Graph
from .orbits import orbit_counts

KINDS = ("degree", "clustering", "orbit4", "spectral")


@dataclass(frozen=True)
class GraphStatistic:
    """``histogram`` holds normalized bin weights, except for ``orbit4`` where
    it is the mean orbit-count vector."""

    kind: str
    histogram: np.ndarray
    bin_width: float


def _normalized(counts) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    return counts / total if total > 0 else counts


def graph_statistic(graph: Graph, kind: str, clustering_bins: int = 100, spectral_bins: int = 200) -> GraphStatistic:
    if kind == "degree":
        return GraphStatistic(kind, _normalized(np.bincount(graph.degrees)), 1.0)
    if kind == "clustering":
        cc = list(nx.clustering(graph.to_networkx()).values())
        hist, _ = np.histogram(cc, bins=clustering_bins, range=(0.0, 1.0))
        return GraphStatistic(kind, _normalized(hist), 1.0 / clustering_bins)
    if kind == "orbit4":
        return GraphStatistic(kind, orbit_counts(graph).mean(axis=0).astype(np.float64), 1.0)
    if kind == "spectral":
        a = graph.adjacency.astype(np.float64)
        deg = a.sum(axis=1)
        inv = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
        lap = np.diag((deg > 0).astype(np.float64)) - inv[:, None] * a * inv[None, :]
        eig = np.clip(np.linalg.eigvalsh(lap), 0.0, 2.0)
        hist, _ = np.histogram(eig, bins=spectral_bins, range=(0.0, 2.0))
        return GraphStatistic(kind, _normalized(hist), 2.0 / spectral_bins)
    raise ConfigurationError(f"unknown statistic {kind!r}; expected one of {KINDS}")
