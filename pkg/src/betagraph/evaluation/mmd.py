"""Squared maximum mean discrepancy with a Gaussian kernel on 1D earth mover's distance."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import ContractError
from .stats import GraphStatistic


def _pad(vectors: Sequence[np.ndarray]) -> np.ndarray:
    width = max(len(v) for v in vectors)
    out = np.zeros((len(vectors), width))
    for i, v in enumerate(vectors):
        out[i, : len(v)] = v
    return out


def wasserstein_1d(p, q, bin_width: float = 1.0) -> float:
    """W1 between histograms on a shared uniform grid: L1 of the CDF gap."""
    x = _pad([np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64)])
    return float(np.abs(np.cumsum(x[0] - x[1])).sum() * bin_width)


def _distance_matrix(a: np.ndarray, b: np.ndarray, kind: str, width: float) -> np.ndarray:
    if kind == "orbit4":
        return np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(-1))
    ca, cb = np.cumsum(a, axis=1), np.cumsum(b, axis=1)
    return np.abs(ca[:, None, :] - cb[None, :, :]).sum(-1) * width


def mmd(stats_a: Sequence[GraphStatistic], stats_b: Sequence[GraphStatistic], sigma: float = 1.0) -> float:
    """Biased (V-statistic) MMD^2, clipped at 0.

    Histograms use ``exp(-W1^2 / (2 sigma^2))``; orbit count vectors use the
    same Gaussian on Euclidean distance.
    """
    if not stats_a or not stats_b:
        raise ContractError("mmd needs two nonempty lists")
    kinds = {s.kind for s in stats_a} | {s.kind for s in stats_b}
    if len(kinds) != 1:
        raise ContractError(f"cannot compare statistics of different kinds: {sorted(kinds)}")
    widths = {s.bin_width for s in stats_a} | {s.bin_width for s in stats_b}
    if len(widths) != 1:
        raise ContractError("histograms use different bin widths")
    kind, width = kinds.pop(), widths.pop()
    x = _pad([s.histogram for s in stats_a] + [s.histogram for s in stats_b])
    a, b = x[: len(stats_a)], x[len(stats_a) :]

    def k(u, v):
        d = _distance_matrix(u, v, kind, width)
        return np.exp(-(d**2) / (2.0 * sigma**2))

    val = k(a, a).mean() + k(b, b).mean() - 2.0 * k(a, b).mean()
    return max(float(val), 0.0)
