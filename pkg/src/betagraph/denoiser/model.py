"""Permutation-equivariant graph transformer predicting clean graphs.

Node stream ``x`` (B, N, h) and edge stream ``e`` (B, N, N, h). Each layer:

    Y_ij   = (q_i * k_j) / sqrt(d_head)            per channel
    Y_ij  <- Y_ij * (1 + W_mul e_ij) + W_add e_ij   FiLM from the edge stream
    logits = per-head sum of Y over the head's channels, masked softmax over j
    x     <- LN(x + W_o attn(V));  x <- LN(x + FFN(x))
    e     <- LN(e + W_e Y);        e <- LN(e + FFN(e))

A sinusoidal embedding of ``t / T`` goes through a small MLP and is added to
both streams at the start of every layer.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn

from ..errors import ConfigurationError, NumericalError

LOGIT_CLAMP = 30.0


@dataclass(frozen=True)
class DenoiserConfig:
    layers: int = 4
    hidden: int = 64
    heads: int = 4
    time_dim: int = 32
    n_features: int = 0

    def __post_init__(self):
        if self.layers < 1 or self.hidden < 1 or self.heads < 1:
            raise ConfigurationError("layers, hidden and heads must be positive")
        if self.hidden % self.heads:
            raise ConfigurationError(f"hidden={self.hidden} is not divisible by heads={self.heads}")
        if self.time_dim < 2 or self.time_dim % 2:
            raise ConfigurationError("time_dim must be an even integer >= 2")
        if self.n_features < 0:
            raise ConfigurationError("n_features must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)


def _init_linear(layer: nn.Linear, gen: torch.Generator) -> nn.Linear:
    bound = 1.0 / math.sqrt(layer.in_features)
    with torch.no_grad():
        layer.weight.uniform_(-bound, bound, generator=gen)
        layer.bias.zero_()
    return layer


def timestep_embedding(t: torch.Tensor, T: int, dim: int) -> torch.Tensor:
    half = dim // 2
    freqs = torch.exp(-math.log(10000.0) * torch.arange(half, dtype=torch.float64) / half)
    angle = (t.to(torch.float64) / T)[:, None] * 1000.0 * freqs[None, :]
    return torch.cat([torch.sin(angle), torch.cos(angle)], dim=-1)


class _Layer(nn.Module):
    def __init__(self, cfg: DenoiserConfig, gen: torch.Generator):
        super().__init__()
        h = cfg.hidden
        self.heads = cfg.heads
        lin = lambda i, o: _init_linear(nn.Linear(i, o), gen)  # noqa: E731
        self.q, self.k, self.v = lin(h, h), lin(h, h), lin(h, h)
        self.e_mul, self.e_add = lin(h, h), lin(h, h)
        self.x_out, self.e_out = lin(h, h), lin(h, h)
        self.t_x, self.t_e = lin(h, h), lin(h, h)
        self.ffn_x = nn.Sequential(lin(h, 2 * h), nn.SiLU(), lin(2 * h, h))
        self.ffn_e = nn.Sequential(lin(h, 2 * h), nn.SiLU(), lin(2 * h, h))
        self.ln_x1, self.ln_x2 = nn.LayerNorm(h), nn.LayerNorm(h)
        self.ln_e1, self.ln_e2 = nn.LayerNorm(h), nn.LayerNorm(h)

    def forward(self, x, e, temb, node_mask, pair_mask):
        b, n, h = x.shape
        dh = h // self.heads
        x = x + self.t_x(temb)[:, None, :]
        e = e + self.t_e(temb)[:, None, None, :]
        q, k, v = self.q(x), self.k(x), self.v(x)
        y = q[:, :, None, :] * k[:, None, :, :] / math.sqrt(dh)
        y = y * (1.0 + self.e_mul(e)) + self.e_add(e)
        logits = y.reshape(b, n, n, self.heads, dh).sum(-1)
        logits = logits.masked_fill(~node_mask[:, None, :, None], float("-inf"))
        # padded rows have no valid key; give them a dummy uniform row
        logits = logits.masked_fill(~node_mask[:, :, None, None], 0.0)
        attn = torch.softmax(logits, dim=2)
        msg = torch.einsum("bijh,bjhd->bihd", attn, v.reshape(b, n, self.heads, dh)).reshape(b, n, h)
        x = self.ln_x1(x + self.x_out(msg))
        x = self.ln_x2(x + self.ffn_x(x))
        e = self.ln_e1(e + self.e_out(y))
        e = self.ln_e2(e + self.ffn_e(e))
        return x * node_mask[..., None], e * pair_mask[..., None]


class GraphTransformer(nn.Module):
    """Maps standardized ``(adjacency, features)`` and ``t`` to estimates in (0, 1)."""

    def __init__(self, cfg: DenoiserConfig, T: int = 1000, seed: int = 0, output_bias=(0.0, None)):
        super().__init__()
        self.cfg = cfg
        self.T = T
        gen = torch.Generator().manual_seed(int(seed))
        h = cfg.hidden
        lin = lambda i, o: _init_linear(nn.Linear(i, o), gen)  # noqa: E731
        self.x_in = lin(cfg.n_features + 1, h)
        self.e_in = lin(1, h)
        self.time_mlp = nn.Sequential(lin(cfg.time_dim, h), nn.SiLU(), lin(h, h))
        self.layers = nn.ModuleList(_Layer(cfg, gen) for _ in range(cfg.layers))
        self.e_head = lin(h, 1)
        self.x_head = lin(h, max(cfg.n_features, 1))
        bias_a, bias_x = output_bias
        with torch.no_grad():
            self.e_head.bias.fill_(float(bias_a))
            if bias_x is not None and cfg.n_features:
                self.x_head.bias.copy_(torch.as_tensor(np.asarray(bias_x, dtype=np.float64)))

    def forward(self, adj, feat, t, node_mask):
        """Tensors in, tensors out; see :func:`predict` for the numpy wrapper."""
        dtype = self.e_in.weight.dtype
        adj = adj.to(dtype)
        feat = feat.to(dtype)
        node_mask = node_mask.to(torch.bool)
        b, n = node_mask.shape
        eye = torch.eye(n, dtype=torch.bool)
        pair_mask = node_mask[:, :, None] & node_mask[:, None, :]
        # a constant channel lets feature-less graphs still carry a node signal
        x = self.x_in(torch.cat([feat, torch.ones(b, n, 1, dtype=dtype)], dim=-1))
        e_raw = adj.masked_fill(eye, 0.0)[..., None]
        x = x * node_mask[..., None]
        e = self.e_in(e_raw) * pair_mask[..., None]
        temb = self.time_mlp(timestep_embedding(t, self.T, self.cfg.time_dim).to(dtype))
        for i, layer in enumerate(self.layers):
            x, e = layer(x, e, temb, node_mask, pair_mask)
            if torch.isnan(x).any() or torch.isnan(e).any():
                raise NumericalError(f"NaN activation in denoiser layer {i}")
        a_logit = self.e_head(e)[..., 0].clamp(-LOGIT_CLAMP, LOGIT_CLAMP)
        a_hat = torch.sigmoid(a_logit.to(torch.float64))
        a_hat = 0.5 * (a_hat + a_hat.transpose(1, 2))
        a_hat = a_hat * pair_mask
        x_logit = self.x_head(x).clamp(-LOGIT_CLAMP, LOGIT_CLAMP)
        x_hat = torch.sigmoid(x_logit.to(torch.float64)) * node_mask[..., None]
        return a_hat, x_hat[..., : self.cfg.n_features]


DenoiserParameters = dict  # name -> tensor, as returned by ``state_dict()``


def predict(model: GraphTransformer, adj_in, feat_in, t, node_mask):
    """Numpy wrapper around the forward pass; ``t`` is a scalar or per graph."""
    adj_in = np.asarray(adj_in)
    node_mask = np.asarray(node_mask, dtype=bool)
    squeeze = adj_in.ndim == 2
    if squeeze:
        adj_in, feat_in, node_mask = adj_in[None], np.asarray(feat_in)[None], node_mask[None]
    b = adj_in.shape[0]
    t = torch.as_tensor(np.broadcast_to(np.asarray(t, dtype=np.int64), (b,)).copy())
    if not bool(np.all(np.isfinite(adj_in))) or not bool(np.all(np.isfinite(feat_in))):
        raise NumericalError("non-finite predictor input")
    with torch.no_grad():
        a_hat, x_hat = model(torch.as_tensor(adj_in), torch.as_tensor(np.asarray(feat_in)), t, torch.as_tensor(node_mask))
    a_hat, x_hat = a_hat.numpy(), x_hat.numpy()
    return (a_hat[0], x_hat[0]) if squeeze else (a_hat, x_hat)


def gradients(model: nn.Module, loss_closure) -> dict[str, torch.Tensor]:
    """Reverse-mode gradient of ``loss_closure(model)`` for every parameter."""
    names, params = zip(*[(k, p) for k, p in model.named_parameters() if p.requires_grad])
    loss = loss_closure(model)
    grads = torch.autograd.grad(loss, params, allow_unused=True)
    out = {}
    for name, p, g in zip(names, params, grads):
        g = torch.zeros_like(p) if g is None else g
        if not bool(torch.isfinite(g).all()):
            raise NumericalError(f"non-finite gradient for {name}")
        out[name] = g
    return out
