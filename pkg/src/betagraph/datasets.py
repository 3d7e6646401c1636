"""Synthetic benchmark generators: community-small, grid, SBM and planar.

Each graph ``i`` draws from its own stream ``rng_stream(seed, i)``, so the
dataset does not depend on generation order or on how work is split.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.spatial import Delaunay

from .errors import ConfigurationError
from .graph import Graph
from .numerics import rng_stream

_DEFAULTS: dict[str, dict[str, Any]] = {
    "community_small": {"community_min": 6, "community_max": 10, "p_intra": 0.7, "inter_frac": 0.05},
    "grid": {"side_min": 10, "side_max": 20},
    "sbm": {
        "communities_min": 2,
        "communities_max": 5,
        "size_min": 20,
        "size_max": 40,
        "p_intra": 0.3,
        "p_inter": 0.05,
    },
    "planar": {"n": 64},
}
_DEFAULT_COUNT = {"community_small": 100, "grid": 100, "sbm": 200, "planar": 200}


@dataclass(frozen=True)
class DatasetSpec:
    kind: str
    count: int | None = None
    seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _DEFAULTS:
            raise ConfigurationError(
                f"unknown dataset kind {self.kind!r}; expected one of {sorted(_DEFAULTS)}"
            )
        unknown = set(self.params) - set(_DEFAULTS[self.kind])
        if unknown:
            raise ConfigurationError(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        if self.count is None:
            object.__setattr__(self, "count", _DEFAULT_COUNT[self.kind])
        if self.count < 0:
            raise ConfigurationError("count must be >= 0")
        merged = {**_DEFAULTS[self.kind], **self.params}
        object.__setattr__(self, "params", merged)
        _validate(self.kind, merged)


def _validate(kind: str, p: dict[str, Any]) -> None:
    def need(cond, msg):
        if not cond:
            raise ConfigurationError(f"{kind}: {msg}")

    if kind == "community_small":
        need(6 <= p["community_min"] <= p["community_max"] <= 10, "community size must lie in [6, 10]")
        need(0 <= p["p_intra"] <= 1, "p_intra must be a probability")
    elif kind == "grid":
        need(10 <= p["side_min"] <= p["side_max"] <= 20, "grid sides must lie in [10, 20]")
    elif kind == "sbm":
        need(2 <= p["communities_min"] <= p["communities_max"] <= 5, "2-5 communities")
        need(20 <= p["size_min"] <= p["size_max"] <= 40, "community sizes in [20, 40]")
        need(0 <= p["p_inter"] <= 1 and 0 <= p["p_intra"] <= 1, "probabilities in [0, 1]")
    elif kind == "planar":
        need(p["n"] >= 3, "planar graphs need at least 3 nodes")


def _community_small(rng: np.random.Generator, p) -> Graph:
    c = int(rng.integers(p["community_min"], p["community_max"], endpoint=True))
    n = 2 * c
    a = np.zeros((n, n), dtype=np.uint8)
    for lo in (0, c):
        block = np.triu(rng.random((c, c)) < p["p_intra"], 1)
        a[lo : lo + c, lo : lo + c] = block | block.T
    # floor(0.05 N) distinct cross edges, uniformly among the c*c candidates
    n_inter = int(np.floor(p["inter_frac"] * n))
    if n_inter:
        picks = rng.choice(c * c, size=n_inter, replace=False)
        u, v = np.divmod(picks, c)
        a[u, c + v] = a[c + v, u] = 1
    return Graph(a)


def _grid(rng: np.random.Generator, p) -> Graph:
    rows = int(rng.integers(p["side_min"], p["side_max"], endpoint=True))
    cols = int(rng.integers(p["side_min"], p["side_max"], endpoint=True))
    n = rows * cols
    a = np.zeros((n, n), dtype=np.uint8)
    idx = np.arange(n).reshape(rows, cols)
    for u, v in ((idx[:, :-1], idx[:, 1:]), (idx[:-1, :], idx[1:, :])):
        a[u.ravel(), v.ravel()] = 1
        a[v.ravel(), u.ravel()] = 1
    return Graph(a)


def _sbm(rng: np.random.Generator, p) -> Graph:
    k = int(rng.integers(p["communities_min"], p["communities_max"], endpoint=True))
    sizes = rng.integers(p["size_min"], p["size_max"], size=k, endpoint=True)
    labels = np.repeat(np.arange(k), sizes)
    n = labels.size
    prob = np.where(labels[:, None] == labels[None, :], p["p_intra"], p["p_inter"])
    upper = np.triu(rng.random((n, n)) < prob, 1)
    return Graph((upper | upper.T).astype(np.uint8))


def _planar(rng: np.random.Generator, p) -> Graph:
    n = int(p["n"])
    points = rng.random((n, 2))
    tri = Delaunay(points)
    a = np.zeros((n, n), dtype=np.uint8)
    for s in tri.simplices:
        for i in range(3):
            u, v = s[i], s[(i + 1) % 3]
            a[u, v] = a[v, u] = 1
    return Graph(a)


_BUILDERS = {"community_small": _community_small, "grid": _grid, "sbm": _sbm, "planar": _planar}


def generate_dataset(spec: DatasetSpec) -> list[Graph]:
    build = _BUILDERS[spec.kind]
    return [build(rng_stream(spec.seed, i), spec.params) for i in range(spec.count)]


def split_dataset(graphs, seed: int, train_fraction: float = 0.8):
    """Train/test split stratified by node count.

    Graphs are ordered by ``(n, random key)`` and every ``1/(1-f)``-th one is
    taken for testing, so both parts cover the size range evenly. Returns
    ``(train, test, test_indices)``.
    """
    if not 0 < train_fraction < 1:
        raise ConfigurationError("train_fraction must lie in (0, 1)")
    total = len(graphs)
    key = rng_stream(seed, 0xC0FFEE).random(total)
    order = sorted(range(total), key=lambda i: (graphs[i].n, key[i]))
    n_test = total - int(round(train_fraction * total))
    picks = {int((j + 0.5) * total / n_test) for j in range(n_test)} if n_test else set()
    test_idx = sorted(order[p] for p in picks)
    chosen = set(test_idx)
    train = [g for i, g in enumerate(graphs) if i not in chosen]
    test = [graphs[i] for i in test_idx]
    return train, test, test_idx
