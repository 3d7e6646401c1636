"""Containers for diffusion trajectories and concentration fields.

Arrays may carry leading batch dimensions: adjacency-shaped arrays are
``(..., N, N)``, feature-shaped ``(..., N, D)``, masks ``(..., N)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

Domain = Literal["original", "logit"]


@dataclass(frozen=True)
class DiffusionState:
    adjacency: np.ndarray
    features: np.ndarray
    t: int = 0
    domain: Domain = "original"
    node_mask: np.ndarray | None = None

    def __post_init__(self):
        if self.domain not in ("original", "logit"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.node_mask is None:
            object.__setattr__(
                self, "node_mask", np.ones(self.adjacency.shape[:-1], dtype=bool)
            )

    @property
    def n(self) -> int:
        return self.adjacency.shape[-1]

    def with_values(self, adjacency, features, t=None, domain=None) -> "DiffusionState":
        return replace(
            self,
            adjacency=adjacency,
            features=features,
            t=self.t if t is None else t,
            domain=self.domain if domain is None else domain,
        )

    def edge_mask(self, include_diagonal: bool = False) -> np.ndarray:
        """Mask of adjacency entries between two real (unpadded) nodes."""
        m = self.node_mask[..., :, None] & self.node_mask[..., None, :]
        if not include_diagonal:
            m = m & ~np.eye(self.n, dtype=bool)
        return m


@dataclass(frozen=True)
class ConcentrationField:
    """Per-edge and per-node concentration values (eta)."""

    eta_edges: np.ndarray
    eta_nodes: np.ndarray

    def __post_init__(self):
        if np.any(~(self.eta_edges > 0)) or np.any(~(self.eta_nodes > 0)):
            raise ValueError("concentration values must be > 0")
        if not np.array_equal(self.eta_edges, np.swapaxes(self.eta_edges, -1, -2)):
            raise ValueError("eta_edges must be symmetric")

    @classmethod
    def constant(cls, n: int, eta: float = 30.0) -> "ConcentrationField":
        return cls(np.full((n, n), float(eta)), np.full(n, float(eta)))

    def for_features(self) -> np.ndarray:
        """Node concentration broadcast over the feature columns."""
        return self.eta_nodes[..., None]


def symmetrize_upper(values: np.ndarray) -> np.ndarray:
    """Mirror the strict upper triangle onto the lower one; diagonal kept."""
    n = values.shape[-1]
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    return np.where(upper, values, np.swapaxes(values, -1, -2))
