"""Closed-form KL training objective.

All inputs are transformed values in (0, 1) (i.e. after ``w * g + b``).
Functions accept numpy arrays or torch tensors; numpy in gives numpy out,
tensors keep their autograd graph. Computation is in float64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .errors import ConfigurationError, ContractError, DomainError
from .numerics import NoiseSchedule
from .numerics.kl import kl_beta_stable, lgamma_bregman


@dataclass(frozen=True)
class LossConfig:
    omega: float = 0.01
    gamma_node: float = 0.5

    def __post_init__(self):
        if not 0 <= self.omega <= 1:
            raise ConfigurationError(f"omega must lie in [0, 1], got {self.omega}")
        if not self.gamma_node >= 0:
            raise ConfigurationError(f"gamma_node must be >= 0, got {self.gamma_node}")


def _as_tensor(x):
    if isinstance(x, torch.Tensor):
        return x.to(torch.float64)
    return torch.as_tensor(np.asarray(x, dtype=np.float64))


def _check_unit(*tensors):
    for x in tensors:
        if x.numel() and not bool(torch.all((x > 0) & (x < 1))):
            raise DomainError("graph values must lie strictly inside (0, 1)")


def _alphas(schedule: NoiseSchedule, t):
    t = np.asarray(t)
    if np.any(t < 1) or np.any(t > schedule.T):
        raise IndexError(f"timestep outside [1, {schedule.T}]")
    return schedule.alphas[t - 1], schedule.alphas[t]


def _per_entry(kind, g0, g0_hat, t, schedule, eta):
    numpy_out = not isinstance(g0_hat, torch.Tensor)
    g, h = _as_tensor(g0), _as_tensor(g0_hat)
    e = _as_tensor(eta)
    _check_unit(g, h)
    a_prev, a_t = (_as_tensor(a) for a in _alphas(schedule, t))
    if kind == "sampling":
        if np.any(np.asarray(t) < 2):
            raise DomainError("the sampling loss needs t >= 2")
        d = a_prev - a_t
        out = kl_beta_stable(e * d * h, e * (1 - a_prev * h), e * d * g, e * (1 - a_prev * g))
    else:
        out = kl_beta_stable(e * a_t * h, e * (1 - a_t * h), e * a_t * g, e * (1 - a_t * g))
    return out.detach().numpy() if numpy_out else out


def sampling_loss(g0, g0_hat, t, schedule: NoiseSchedule, eta=30.0):
    """Per-entry KL between the predicted and true reverse multipliers."""
    return _per_entry("sampling", g0, g0_hat, t, schedule, eta)


def correction_loss(g0, g0_hat, t, schedule: NoiseSchedule, eta=30.0):
    """Per-entry KL between the predicted and true forward marginals at ``t``."""
    return _per_entry("correction", g0, g0_hat, t, schedule, eta)


def bregman_divergence(x, y):
    """``d_phi(x, y)`` for ``phi(a, b) = ln B(a, b)``, with ``x = (a, b)`` pairs.

    ``KL(Beta(y) || Beta(x)) == bregman_divergence(x, y)``.
    """
    a, b = (np.asarray(v, dtype=np.float64) for v in x)
    c, d = (np.asarray(v, dtype=np.float64) for v in y)
    # phi splits into log-gamma terms, each contributing its own divergence
    return lgamma_bregman(a, c) + lgamma_bregman(b, d) - lgamma_bregman(a + b, c + d)


def _bcast_t(t, batch_shape, ref):
    t = np.asarray(t)
    if t.ndim == 0:
        return t
    if t.shape != batch_shape:
        raise ContractError(f"t has shape {t.shape}, expected {batch_shape}")
    return t.reshape(t.shape + (1,) * (ref.ndim - t.ndim))


def total_loss(G0, G0_hat, t, schedule: NoiseSchedule, eta_field, cfg: LossConfig = LossConfig(), node_mask=None):
    """Scalar objective for a (possibly batched) graph pair.

    ``G0`` and ``G0_hat`` are ``(adjacency, features)`` pairs shaped
    ``(..., N, N)`` and ``(..., N, D)``; ``t`` is a scalar or one timestep per
    leading batch index. Returns mean edge loss (strict upper triangle of real
    nodes) plus ``gamma_node`` times mean feature loss.
    """
    a0, x0 = G0
    a_hat, x_hat = G0_hat
    numpy_out = not isinstance(a_hat, torch.Tensor)
    a0, x0, a_hat, x_hat = (_as_tensor(v) for v in (a0, x0, a_hat, x_hat))
    if a0.shape != a_hat.shape or x0.shape != x_hat.shape:
        raise ContractError("target and prediction shapes differ")
    n = a0.shape[-1]
    if a0.shape[-2] != n or x0.shape[:-1] != a0.shape[:-1]:
        raise ContractError("adjacency must be (..., N, N) and features (..., N, D)")
    batch_shape = tuple(a0.shape[:-2])
    if node_mask is None:
        node_mask = np.ones(a0.shape[:-1], dtype=bool)
    node_mask = torch.as_tensor(np.asarray(node_mask, dtype=bool))
    if tuple(node_mask.shape) != tuple(a0.shape[:-1]):
        raise ContractError("node_mask shape does not match the graphs")
    eta_a = _as_tensor(eta_field.eta_edges)
    eta_x = _as_tensor(eta_field.for_features())
    upper = torch.triu(torch.ones(n, n, dtype=torch.bool), diagonal=1)
    pair = node_mask[..., :, None] & node_mask[..., None, :] & upper
    feat = node_mask[..., None].expand(x0.shape)

    def mix(g, h, eta, t_b, mask):
        # fill excluded entries with a neutral value so the closed forms stay finite
        g = torch.where(mask, g, torch.full_like(g, 0.5))
        h = torch.where(mask, h, torch.full_like(h, 0.5))
        out = 0.0
        if cfg.omega < 1:
            out = (1 - cfg.omega) * sampling_loss(g, h, t_b, schedule, eta)
        if cfg.omega > 0:
            out = out + cfg.omega * correction_loss(g, h, t_b, schedule, eta)
        return torch.where(mask, out, torch.zeros_like(out))

    t_a = _bcast_t(t, batch_shape, a0)
    loss = torch.zeros((), dtype=torch.float64)
    n_pair = int(pair.sum())
    if n_pair:
        loss = mix(a0, a_hat, eta_a, t_a, pair).sum() / n_pair
    n_feat = int(feat.sum())
    if n_feat and cfg.gamma_node:
        t_x = _bcast_t(t, batch_shape, x0)
        loss = loss + cfg.gamma_node * mix(x0, x_hat, eta_x, t_x, feat).sum() / n_feat
    return float(loss) if numpy_out else loss
