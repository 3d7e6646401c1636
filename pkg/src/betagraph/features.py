"""Hand-crafted node features scaled into [0, 1]."""

from __future__ import annotations

from typing import Literal, Sequence

import numpy as np

from .errors import ConfigurationError, ContractError
from .graph import Graph
from .modulation import betweenness_centrality

FeatureScheme = Literal["degree_onehot", "degree_normalized", "betweenness", "eigenvectors"]
SCHEMES = ("degree_onehot", "degree_normalized", "betweenness", "eigenvectors")


def init_node_features(
    graph: Graph, scheme: FeatureScheme = "degree_onehot", max_degree: int | None = None
) -> np.ndarray:
    """Feature matrix for ``graph`` under ``scheme``.

    ``max_degree`` fixes the one-hot width across a dataset; it defaults to
    the graph's own maximum degree.
    """
    deg = graph.degrees
    n = graph.n
    if scheme == "degree_onehot":
        width = int(deg.max() if max_degree is None else max_degree) + 1
        if deg.max() >= width:
            raise ContractError(f"degree {deg.max()} exceeds one-hot width {width}")
        x = np.zeros((n, width))
        x[np.arange(n), deg] = 1.0
        return x
    if scheme == "degree_normalized":
        return (deg / max(n - 1, 1)).astype(np.float64)[:, None]
    if scheme == "betweenness":
        pairs = (n - 1) * (n - 2) / 2.0
        cb = betweenness_centrality(graph)
        return (cb / pairs if pairs > 0 else np.zeros(n))[:, None]
    if scheme == "eigenvectors":
        return _laplacian_eigenvectors(graph)
    raise ConfigurationError(f"unknown feature scheme {scheme!r}")


def _laplacian_eigenvectors(graph: Graph, k: int = 2, tol: float = 1e-8) -> np.ndarray:
    """First ``k`` Laplacian eigenvectors with nonzero eigenvalue, min-max scaled.

    Every zero eigenvalue is skipped, so disconnected graphs use their first
    non-trivial modes; missing columns (too few nonzero eigenvalues) are 0.
    """
    if graph.n < 3:
        raise ContractError("eigenvector features need at least 3 nodes")
    a = graph.adjacency.astype(np.float64)
    lap = np.diag(a.sum(axis=1)) - a
    vals, vecs = np.linalg.eigh(lap)
    keep = np.flatnonzero(vals > tol * max(1.0, vals.max()))[:k]
    out = np.zeros((graph.n, k))
    for j, col in enumerate(keep):
        v = vecs[:, col]
        first = v[np.abs(v) > 1e-12][0]
        if first < 0:
            v = -v
        span = v.max() - v.min()
        out[:, j] = (v - v.min()) / span if span > 1e-12 else 0.0
    return out


def attach_features(
    graphs: Sequence[Graph], scheme: FeatureScheme = "degree_onehot", max_degree: int | None = None
) -> list[Graph]:
    """Replace every graph's features using one dataset-wide one-hot width."""
    if scheme == "degree_onehot" and max_degree is None:
        max_degree = max(int(g.degrees.max()) for g in graphs)
    return [g.with_features(init_node_features(g, scheme, max_degree)) for g in graphs]


def channel_types(scheme: FeatureScheme, width: int) -> list[str]:
    """``"binary"`` for one-hot columns, ``"continuous"`` otherwise."""
    kind = "binary" if scheme == "degree_onehot" else "continuous"
    return [kind] * width
