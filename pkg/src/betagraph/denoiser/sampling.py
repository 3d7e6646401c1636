"""Drawing graphs from a trained predictor."""

from __future__ import annotations

from collections import defaultdict
from typing import Callable, Sequence

import numpy as np

from ..diffusion import SamplerConfig, ancestral_sample_batch
from ..graph import Graph, TransformParams
from ..modulation import ModulationStrategy, assign_eta
from ..numerics import NoiseSchedule
from ..state import ConcentrationField
from .model import GraphTransformer, predict


def quantile_sizes(training: Sequence[Graph], count: int) -> list[int]:
    """``count`` node counts at evenly spaced quantiles of the training sizes."""
    sizes = sorted(g.n for g in training)
    return [sizes[int((i + 0.5) * len(sizes) / count)] for i in range(count)]


def fields_for_sizes(sizes, training: Sequence[Graph], strategy: ModulationStrategy, rng) -> list[ConcentrationField]:
    """Reuse the concentration field of a random training graph of each size."""
    if strategy.kind == "none":
        return [ConcentrationField.constant(n, strategy.default_eta) for n in sizes]
    by_size = defaultdict(list)
    for g in training:
        by_size[g.n].append(g)
    out = []
    for n in sizes:
        pool = by_size[n]
        out.append(assign_eta(pool[int(rng.integers(len(pool)))], strategy))
    return out


def model_predictor(model: GraphTransformer) -> Callable:
    def fn(adj_in, feat_in, t, node_mask):
        return predict(model, adj_in, feat_in, t, node_mask)

    return fn


def sample_graphs(
    model: GraphTransformer,
    count: int,
    training: Sequence[Graph],
    strategy: ModulationStrategy,
    schedule: NoiseSchedule,
    params: TransformParams,
    config: SamplerConfig,
    rng: np.random.Generator,
    batch_size: int = 64,
    on_snapshot=None,
) -> list[Graph]:
    sizes = quantile_sizes(training, count)
    fields = fields_for_sizes(sizes, training, strategy, rng)
    d = training[0].features.shape[1]
    out: list[Graph] = []
    for lo in range(0, count, batch_size):
        chunk = fields[lo : lo + batch_size]
        snap = None
        if on_snapshot is not None:
            snap = lambda t, mask, vals, a_hat, lo=lo: on_snapshot(t, lo, mask, vals, a_hat)  # noqa: E731
        out.extend(
            ancestral_sample_batch(model_predictor(model), chunk, d, schedule, params, config, rng, snap)
        )
    return out
