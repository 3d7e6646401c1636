"""Graph container and the affine map between raw graphs and diffusion values."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ContractError
from .state import DiffusionState, symmetrize_upper


@dataclass(eq=False)
class Graph:
    """Undirected simple graph with node features in ``[0, 1]``."""

    adjacency: np.ndarray
    features: np.ndarray = field(default=None)

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ContractError(f"adjacency must be square and non-empty, got {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise ContractError("adjacency entries must be 0 or 1")
        if not np.array_equal(a, a.T):
            raise ContractError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise ContractError("self-loops are not allowed")
        self.adjacency = a.astype(np.uint8)
        if self.features is None:
            self.features = np.zeros((a.shape[0], 0))
        x = np.asarray(self.features, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] != a.shape[0]:
            raise ContractError(f"features must be (N, D), got {x.shape}")
        if np.any(~((x >= 0) & (x <= 1))):
            raise ContractError("feature entries must lie in [0, 1]")
        self.features = x

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1).astype(np.int64)

    @property
    def n_edges(self) -> int:
        return int(np.triu(self.adjacency, 1).sum())

    def edges(self) -> list[tuple[int, int]]:
        u, v = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(u.tolist(), v.tolist()))

    @classmethod
    def from_edges(cls, n: int, edges, features=None) -> "Graph":
        a = np.zeros((n, n), dtype=np.uint8)
        for u, v in edges:
            a[u, v] = a[v, u] = 1
        return cls(a, features)

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    def with_features(self, features) -> "Graph":
        return Graph(self.adjacency.copy(), features)

    def permuted(self, perm) -> "Graph":
        perm = np.asarray(perm)
        return Graph(self.adjacency[np.ix_(perm, perm)], self.features[perm])

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            np.array_equal(self.adjacency, other.adjacency)
            and self.features.shape == other.features.shape
            and np.array_equal(self.features, other.features)
        )

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.n_edges}, D={self.features.shape[1]})"


@dataclass(frozen=True)
class TransformParams:
    """Scale/shift pairs mapping raw values in [0, 1] into (0, 1)."""

    w_A: float = 0.9
    b_A: float = 0.09
    w_X: float = 0.9
    b_X: float = 0.09

    def __post_init__(self):
        vals = (self.w_A, self.b_A, self.w_X, self.b_X)
        if min(vals) <= 0:
            raise ConfigurationError(f"scale and shift must all be > 0, got {vals}")
        if max(self.w_A + self.b_A, self.w_X + self.b_X) > 1:
            raise ConfigurationError("w + b must not exceed 1")


def transform(graph: Graph, params: TransformParams) -> DiffusionState:
    """Map a graph into diffusion space; the diagonal is carried as ``b_A``."""
    a0 = params.w_A * graph.adjacency.astype(np.float64) + params.b_A
    x0 = params.w_X * graph.features + params.b_X
    return DiffusionState(a0, x0, t=0, domain="original")


def inverse_transform_quantize(state, params: TransformParams, threshold: float = 0.5) -> Graph:
    """Undo the affine map and threshold the adjacency into a simple graph.

    ``state`` is a :class:`DiffusionState` in the original domain for a single
    graph, or an ``(adjacency, features)`` pair of arrays.
    """
    if isinstance(state, DiffusionState):
        adjacency, features = state.adjacency, state.features
    else:
        adjacency, features = state
    raw_a = (np.asarray(adjacency, dtype=np.float64) - params.b_A) / params.w_A
    a = (symmetrize_upper(raw_a) >= threshold).astype(np.uint8)
    np.fill_diagonal(a, 0)
    raw_x = (np.asarray(features, dtype=np.float64) - params.b_X) / params.w_X
    return Graph(a, np.clip(raw_x, 0.0, 1.0))
