"""Training loop: one optimizer update per minibatch of padded graphs.

Randomness is keyed by position rather than drawn from a running stream:
epoch ``e`` shuffles with ``rng_stream(seed, 1, e)`` and step ``k`` draws its
timesteps and noise from ``rng_stream(seed, 2, k)``. A run resumed from a
checkpoint at step ``k`` therefore continues exactly as the uninterrupted run.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
import torch

from ..diffusion import forward_marginal_sample
from ..errors import ConfigurationError, ContractError, NumericalError
from ..graph import Graph, TransformParams
from ..io import dumps_graph
from ..losses import LossConfig, total_loss
from ..modulation import ModulationStrategy, assign_eta
from ..numerics import NoiseSchedule, logit, rng_stream
from ..preconditioning import ChannelModel, PrecondStats
from ..state import ConcentrationField, DiffusionState
from .model import DenoiserConfig, GraphTransformer

SHUFFLE_STREAM = 1
NOISE_STREAM = 2
INIT_STREAM = 3


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 2000
    batch_size: int = 16
    lr: float = 0.002
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    ema_decay: float = 0.999
    domain: str = "logit"
    precondition: bool = True
    seed: int = 0
    K: int = 1000
    max_loss: float = 1e6

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if self.domain not in ("original", "logit"):
            raise ConfigurationError(f"unknown domain {self.domain!r}")
        if self.steps < 0 or self.batch_size < 1:
            raise ConfigurationError("steps must be >= 0 and batch_size >= 1")
        if not self.lr > 0 or not 0 <= self.ema_decay < 1:
            raise ConfigurationError("lr must be > 0 and ema_decay in [0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)


def canonical_order(graphs: Sequence[Graph]) -> list[Graph]:
    """Sort by serialized form so training does not depend on input order."""
    return [g for _, g in sorted(((dumps_graph(g), i), g) for i, g in enumerate(graphs))]


def pad_batch(graphs: Sequence[Graph], fields: Sequence[ConcentrationField], params: TransformParams, fill=0.5):
    """Transformed, padded ``(A0, X0)``, node mask and concentration field."""
    b = len(graphs)
    n = max(g.n for g in graphs)
    d = graphs[0].features.shape[1]
    a0 = np.full((b, n, n), fill)
    x0 = np.full((b, n, d), fill)
    mask = np.zeros((b, n), dtype=bool)
    eta_a = np.full((b, n, n), 30.0)
    eta_n = np.full((b, n), 30.0)
    for i, (g, f) in enumerate(zip(graphs, fields)):
        k = g.n
        a0[i, :k, :k] = params.w_A * g.adjacency + params.b_A
        x0[i, :k] = params.w_X * g.features + params.b_X
        mask[i, :k] = True
        eta_a[i, :k, :k] = f.eta_edges
        eta_n[i, :k] = f.eta_nodes
    return a0, x0, mask, ConcentrationField(eta_a, eta_n)


@dataclass
class TrainingLog:
    steps: list[int] = field(default_factory=list)
    losses: list[float] = field(default_factory=list)

    def append(self, step: int, loss: float) -> None:
        self.steps.append(step)
        self.losses.append(loss)

    def records(self) -> list[dict]:
        return [{"loss": l, "step": s} for s, l in zip(self.steps, self.losses)]


class Trainer:
    """Holds the model, EMA copy, optimizer and every derived dataset statistic."""

    def __init__(
        self,
        dataset: Sequence[Graph],
        schedule: NoiseSchedule = NoiseSchedule(),
        eta_strategy: ModulationStrategy = ModulationStrategy(),
        loss_cfg: LossConfig = LossConfig(),
        denoiser_cfg: DenoiserConfig | None = None,
        train_cfg: TrainConfig = TrainConfig(),
        params: TransformParams = TransformParams(),
        channel_kinds: Sequence[str] | None = None,
    ):
        if not dataset:
            raise ContractError("training needs at least one graph")
        widths = {g.features.shape[1] for g in dataset}
        if len(widths) != 1:
            raise ContractError(f"graphs disagree on feature width: {sorted(widths)}")
        d = widths.pop()
        if denoiser_cfg is None:
            denoiser_cfg = DenoiserConfig(n_features=d)
        if denoiser_cfg.n_features != d:
            raise ContractError(f"denoiser expects {denoiser_cfg.n_features} features, data has {d}")
        self.graphs = canonical_order(dataset)
        self.schedule = schedule
        self.strategy = eta_strategy
        self.loss_cfg = loss_cfg
        self.denoiser_cfg = denoiser_cfg
        self.cfg = train_cfg
        self.params = params
        self.channel_kinds = list(channel_kinds) if channel_kinds is not None else ["continuous"] * d
        self.fields = [assign_eta(g, eta_strategy) for g in self.graphs]

        pairs = sum(g.n * (g.n - 1) // 2 for g in self.graphs)
        self.edge_density = sum(g.n_edges for g in self.graphs) / pairs if pairs else 0.0
        feats = np.concatenate([g.features for g in self.graphs], axis=0)
        self.prior_mean = (
            params.w_A * self.edge_density + params.b_A,
            params.w_X * feats.mean(axis=0) + params.b_X if d else np.zeros(0),
        )
        etas = set(eta_strategy.etas()) | {30.0}
        self.stats = (
            PrecondStats.from_dataset(
                self.graphs, params, schedule, train_cfg.domain, sorted(etas), self.channel_kinds, train_cfg.K
            )
            if train_cfg.precondition
            else None
        )
        seed = int(rng_stream(train_cfg.seed, INIT_STREAM).integers(2**31))
        bias = (logit(self.edge_density, 1e-4), logit(feats.mean(axis=0), 1e-4) if d else None)
        self.model = GraphTransformer(denoiser_cfg, schedule.T, seed=seed, output_bias=bias)
        self.ema = {k: v.detach().clone() for k, v in self.model.state_dict().items()}
        self.optimizer = torch.optim.Adam(
            self.model.parameters(), lr=train_cfg.lr, betas=train_cfg.betas, eps=train_cfg.eps
        )
        self.step = 0
        self.log = TrainingLog()

    # -- batching -------------------------------------------------------
    def batch_indices(self, k: int) -> np.ndarray:
        n = len(self.graphs)
        per_epoch = math.ceil(n / self.cfg.batch_size)
        epoch, j = divmod(k, per_epoch)
        perm = rng_stream(self.cfg.seed, SHUFFLE_STREAM, epoch).permutation(n)
        return perm[j * self.cfg.batch_size : (j + 1) * self.cfg.batch_size]

    def model_inputs(self, state: DiffusionState, eta: ConcentrationField):
        if self.stats is not None:
            return self.stats.standardize(state, eta)
        pair = state.edge_mask()
        return (
            np.where(pair, state.adjacency, 0.0),
            np.where(state.node_mask[..., None], state.features, 0.0),
        )

    def loss_at(self, k: int, model: GraphTransformer | None = None):
        """Loss tensor of training step ``k`` (0-based) for the current parameters."""
        model = self.model if model is None else model
        idx = self.batch_indices(k)
        graphs = [self.graphs[i] for i in idx]
        a0, x0, mask, eta = pad_batch(graphs, [self.fields[i] for i in idx], self.params)
        rng = rng_stream(self.cfg.seed, NOISE_STREAM, k)
        t = rng.integers(2, self.schedule.T, size=len(idx), endpoint=True)
        clean = DiffusionState(a0, x0, t=0, domain="original", node_mask=mask)
        # draw each graph at its own timestep
        noisy_a = np.empty_like(a0)
        noisy_x = np.empty_like(x0)
        for i in range(len(idx)):
            sub = DiffusionState(a0[i], x0[i], node_mask=mask[i])
            sub_eta = ConcentrationField(eta.eta_edges[i], eta.eta_nodes[i])
            s = forward_marginal_sample(sub, int(t[i]), self.schedule, sub_eta, rng, domain=self.cfg.domain)
            noisy_a[i], noisy_x[i] = s.adjacency, s.features
        adj_in = np.empty_like(a0)
        feat_in = np.empty_like(x0)
        for i in range(len(idx)):
            s = DiffusionState(noisy_a[i], noisy_x[i], t=int(t[i]), domain=self.cfg.domain, node_mask=mask[i])
            adj_in[i], feat_in[i] = self.model_inputs(s, ConcentrationField(eta.eta_edges[i], eta.eta_nodes[i]))
        a_hat, x_hat = model(
            torch.as_tensor(adj_in), torch.as_tensor(feat_in), torch.as_tensor(t), torch.as_tensor(mask)
        )
        p = self.params
        pred = (p.w_A * a_hat + p.b_A, p.w_X * x_hat + p.b_X)
        return total_loss((clean.adjacency, clean.features), pred, t, self.schedule, eta, self.loss_cfg, mask), t

    # -- optimization ---------------------------------------------------
    def train_step(self) -> float:
        k = self.step
        self.optimizer.zero_grad(set_to_none=True)
        loss, t = self.loss_at(k)
        value = float(loss.detach())
        if not math.isfinite(value) or value > self.cfg.max_loss:
            raise NumericalError(
                f"training diverged at step {k + 1}: loss={value!r}, timesteps={t.tolist()}"
            )
        loss.backward()
        self.optimizer.step()
        # warm-up keeps early averages from being dominated by the initial weights
        decay = min(self.cfg.ema_decay, (1.0 + k) / (10.0 + k))
        with torch.no_grad():
            for name, v in self.model.state_dict().items():
                if v.is_floating_point():
                    self.ema[name].mul_(decay).add_(v, alpha=1 - decay)
                else:
                    self.ema[name].copy_(v)
        self.step = k + 1
        self.log.append(self.step, value)
        return value

    def run(self, until: int | None = None, on_step: Callable[["Trainer"], None] | None = None) -> "Trainer":
        until = self.cfg.steps if until is None else until
        while self.step < until:
            self.train_step()
            if on_step is not None:
                on_step(self)
        return self

    def ema_model(self) -> GraphTransformer:
        m = GraphTransformer(self.denoiser_cfg, self.schedule.T)
        m.load_state_dict(self.ema)
        m.eval()
        return m

    # -- persistence helpers ------------------------------------------------
    def optimizer_tensors(self) -> dict[str, torch.Tensor]:
        out = {}
        for name, p in self.model.named_parameters():
            st = self.optimizer.state.get(p)
            if st:
                out[f"adam.m.{name}"] = st["exp_avg"]
                out[f"adam.v.{name}"] = st["exp_avg_sq"]
        return out

    def load_optimizer_tensors(self, tensors: dict[str, torch.Tensor], step: int) -> None:
        for name, p in self.model.named_parameters():
            if f"adam.m.{name}" in tensors:
                self.optimizer.state[p] = {
                    "step": torch.tensor(float(step)),
                    "exp_avg": tensors[f"adam.m.{name}"].clone(),
                    "exp_avg_sq": tensors[f"adam.v.{name}"].clone(),
                }

    def precond_header(self) -> dict | None:
        if self.stats is None:
            return None
        return {
            "adjacency": asdict(self.stats.adjacency_model),
            "channels": [asdict(c) for c in self.stats.channels],
            "etas": self.stats.etas.tolist(),
            "K": self.stats.K,
        }


    def header(self) -> dict:
        return {
            "channel_kinds": self.channel_kinds,
            "denoiser": self.denoiser_cfg.to_dict(),
            "domain": self.cfg.domain,
            "edge_density": self.edge_density,
            "loss": asdict(self.loss_cfg),
            "modulation": asdict(self.strategy),
            "precondition": self.precond_header(),
            "prior_mean": [float(self.prior_mean[0]), [float(v) for v in self.prior_mean[1]]],
            "schedule": {"T": self.schedule.T, "c0": self.schedule.c0, "c1": self.schedule.c1},
            "step": self.step,
            "train": self.cfg.to_dict(),
            "transform": asdict(self.params),
        }

    def save(self, path) -> None:
        from .checkpoint import save_checkpoint

        save_checkpoint(path, self.model.state_dict(), self.header(), self.ema, self.optimizer_tensors())

    def restore(self, ckpt) -> "Trainer":
        """Continue from a checkpoint written by :meth:`save` on the same data."""
        if ckpt.header.get("denoiser") != self.denoiser_cfg.to_dict():
            raise ContractError("checkpoint was written with a different denoiser config")
        self.model.load_state_dict(ckpt.params)
        self.ema = {k: v.clone() for k, v in ckpt.ema.items()}
        self.step = int(ckpt.header["step"])
        self.load_optimizer_tensors(ckpt.extra, self.step)
        return self


def stats_from_header(header: dict | None, schedule: NoiseSchedule, domain: str) -> PrecondStats | None:
    if header is None:
        return None
    return PrecondStats(
        schedule,
        domain,
        ChannelModel(**header["adjacency"]),
        [ChannelModel(**c) for c in header["channels"]],
        header["etas"],
        header["K"],
    )


def train(
    dataset,
    schedule: NoiseSchedule = NoiseSchedule(),
    eta_strategy: ModulationStrategy = ModulationStrategy(),
    loss_cfg: LossConfig = LossConfig(),
    denoiser_cfg: DenoiserConfig | None = None,
    train_cfg: TrainConfig = TrainConfig(),
    params: TransformParams = TransformParams(),
    channel_kinds=None,
) -> Trainer:
    """Train from scratch; the returned trainer exposes ``model``, ``ema`` and ``log``."""
    trainer = Trainer(dataset, schedule, eta_strategy, loss_cfg, denoiser_cfg, train_cfg, params, channel_kinds)
    return trainer.run()
