"""Analytic per-timestep moments of noisy graph values, used to standardize
predictor inputs.

Adjacency entries are modelled as two-valued (``a_min`` with probability
``1 - p``, ``a_max`` with probability ``p``); continuous feature channels as
uniform on ``[x_min, x_max]``. Both domains are covered: raw values and
log-odds. In the log-odds domain the variance of ``psi(A) - psi(B)`` is
computed as a whole, i.e. including the covariance between the two digamma
terms (they move in opposite directions with ``g0``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, NumericalError
from .numerics import NoiseSchedule, digamma, log_gamma, trigamma
from .state import ConcentrationField, DiffusionState


def _check_binary(p, a_min, a_max, eta):
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    # the two outcomes are interchangeable labels, so their order is free
    if not (0 < a_min < 1 and 0 < a_max < 1):
        raise DomainError("need a_min and a_max inside (0, 1)")
    if not eta > 0:
        raise DomainError("eta must be > 0")


def _check_uniform(x_min, x_max, eta):
    if not 0 < x_min < x_max < 1:
        raise DomainError("need 0 < x_min < x_max < 1")
    if not eta > 0:
        raise DomainError("eta must be > 0")


def binary_moments(p, a_min, a_max, alpha_t, eta):
    """Mean and variance of ``a_t`` when ``a_0`` is two-valued."""
    _check_binary(p, a_min, a_max, eta)
    alpha_t = np.asarray(alpha_t, dtype=np.float64)
    mean = alpha_t * (p * a_max + (1 - p) * a_min)
    var = (mean - mean**2) / (eta + 1) + eta / (eta + 1) * alpha_t**2 * p * (1 - p) * (
        a_max - a_min
    ) ** 2
    return mean, var


def uniform_moments(x_min, x_max, alpha_t, eta):
    """Mean and variance of ``x_t`` when ``x_0 ~ Unif[x_min, x_max]``."""
    _check_uniform(x_min, x_max, eta)
    alpha_t = np.asarray(alpha_t, dtype=np.float64)
    mean = 0.5 * alpha_t * (x_min + x_max)
    var = (mean - mean**2) / (eta + 1) + eta / (12 * (eta + 1)) * alpha_t**2 * (
        x_max - x_min
    ) ** 2
    return mean, var


def logit_moments_binary(p, a_min, a_max, alpha_t, eta):
    """Mean and variance of ``logit(a_t)`` when ``a_0`` is two-valued."""
    _check_binary(p, a_min, a_max, eta)
    alpha_t = np.asarray(alpha_t, dtype=np.float64)
    a_hi, a_lo = eta * alpha_t * a_max, eta * alpha_t * a_min
    b_hi, b_lo = eta - a_hi, eta - a_lo
    if np.any(np.minimum.reduce([a_hi, a_lo, b_hi, b_lo]) <= 0):
        raise DomainError("beta shape parameters must be > 0")
    m_hi = digamma(a_hi) - digamma(b_hi)
    m_lo = digamma(a_lo) - digamma(b_lo)
    mean = p * m_hi + (1 - p) * m_lo
    within = p * (trigamma(a_hi) + trigamma(b_hi)) + (1 - p) * (trigamma(a_lo) + trigamma(b_lo))
    between = p * (1 - p) * (m_hi - m_lo) ** 2
    return mean, within + between


def _trapezoid_mean(values: np.ndarray) -> np.ndarray:
    """Trapezoid average over the last axis (uniform grid, endpoints halved)."""
    k = values.shape[-1] - 1
    return (values.sum(axis=-1) - 0.5 * (values[..., 0] + values[..., -1])) / k


def guarded_variance(second_moment, mean):
    """``max(E[Y^2] - E[Y]^2, 0)``; quadrature error can push it below zero."""
    return np.maximum(second_moment - mean**2, 0.0)


def logit_moments_uniform(x_min, x_max, alpha_t, eta, K: int = 1000):
    """Mean and variance of ``logit(x_t)`` when ``x_0 ~ Unif[x_min, x_max]``.

    The first moments of digamma/trigamma have closed forms (antiderivatives
    are log-gamma/digamma); the spread of the conditional mean is integrated
    with a ``K``-interval trapezoid rule plus its first end correction.
    """
    if int(K) != K or K < 2:
        raise ConfigurationError(f"K must be an integer >= 2, got {K}")
    _check_uniform(x_min, x_max, eta)
    alpha_t = np.asarray(alpha_t, dtype=np.float64)
    scalar = alpha_t.ndim == 0
    alpha_t = np.atleast_1d(alpha_t)
    z_lo, z_hi = eta * alpha_t * x_min, eta * alpha_t * x_max
    width = z_hi - z_lo
    e_psi_a = (log_gamma(z_hi) - log_gamma(z_lo)) / width
    e_psi_b = (log_gamma(eta - z_lo) - log_gamma(eta - z_hi)) / width
    e_tri_a = (digamma(z_hi) - digamma(z_lo)) / width
    e_tri_b = (digamma(eta - z_lo) - digamma(eta - z_hi)) / width
    mean = e_psi_a - e_psi_b

    grid = x_min + np.linspace(0.0, 1.0, int(K) + 1) * (x_max - x_min)
    z = eta * alpha_t[:, None] * grid[None, :]
    cond_mean = digamma(z) - digamma(eta - z)
    # trapezoid with the Euler-Maclaurin end correction, O(K^-4) instead of O(K^-2)
    slope = 2.0 * cond_mean[:, [0, -1]] * (trigamma(z[:, [0, -1]]) + trigamma(eta - z[:, [0, -1]])) * eta * alpha_t[:, None]
    h = (x_max - x_min) / int(K)
    second = _trapezoid_mean(cond_mean**2) - h**2 / 12.0 * (slope[:, 1] - slope[:, 0]) / (x_max - x_min)
    spread = guarded_variance(second, mean)
    var = e_tri_a + e_tri_b + spread
    if scalar:
        return float(mean[0]), float(var[0])
    return mean, var


@dataclass
class ChannelModel:
    """Distributional assumption for one column of the transformed data."""

    kind: str  # "binary" or "continuous"
    p: float = 0.0
    lo: float = 0.0
    hi: float = 0.0

    def moments(self, alpha, eta, domain: str, K: int):
        if self.kind == "binary":
            fn = logit_moments_binary if domain == "logit" else binary_moments
            return fn(self.p, self.lo, self.hi, alpha, eta)
        if domain == "logit":
            return logit_moments_uniform(self.lo, self.hi, alpha, eta, K)
        return uniform_moments(self.lo, self.hi, alpha, eta)


class PrecondStats:
    """Cached moments for every timestep, concentration level and channel.

    ``mean_a[e, t]`` / ``var_a[e, t]`` hold adjacency statistics for
    concentration ``etas[e]``; ``mean_x[e, t, c]`` / ``var_x[e, t, c]`` the
    feature statistics of channel ``c``. Entries are standardized with the
    moments of their own concentration level.
    """

    def __init__(
        self,
        schedule: NoiseSchedule,
        domain: str,
        adjacency: ChannelModel,
        channels: Sequence[ChannelModel],
        etas: Sequence[float],
        K: int = 1000,
    ):
        if domain not in ("original", "logit"):
            raise ConfigurationError(f"unknown domain {domain!r}")
        self.schedule = schedule
        self.domain = domain
        self.adjacency_model = adjacency
        self.channels = list(channels)
        self.etas = np.array(sorted(set(float(e) for e in etas)))
        self.K = K
        alphas = schedule.alphas
        n_eta, n_t, d = len(self.etas), len(alphas), len(self.channels)
        self.mean_a = np.empty((n_eta, n_t))
        self.var_a = np.empty((n_eta, n_t))
        self.mean_x = np.empty((n_eta, n_t, d))
        self.var_x = np.empty((n_eta, n_t, d))
        for e, eta in enumerate(self.etas):
            self.mean_a[e], self.var_a[e] = adjacency.moments(alphas, eta, domain, K)
            for c, ch in enumerate(self.channels):
                self.mean_x[e, :, c], self.var_x[e, :, c] = ch.moments(alphas, eta, domain, K)
        for arr in (self.mean_a, self.var_a, self.mean_x, self.var_x):
            arr.setflags(write=False)

    @classmethod
    def from_dataset(
        cls,
        graphs,
        params,
        schedule: NoiseSchedule,
        domain: str,
        etas: Sequence[float],
        channel_kinds: Sequence[str] | None = None,
        K: int = 1000,
    ) -> "PrecondStats":
        """Estimate ``p`` and channel ranges from (raw) training graphs."""
        pairs = sum(g.n * (g.n - 1) // 2 for g in graphs)
        edges = sum(g.n_edges for g in graphs)
        p = edges / pairs if pairs else 0.0
        adj = ChannelModel("binary", p, params.b_A, params.w_A + params.b_A)
        feats = np.concatenate([g.features for g in graphs], axis=0)
        d = feats.shape[1]
        kinds = list(channel_kinds) if channel_kinds is not None else ["continuous"] * d
        channels = []
        for c in range(d):
            col = params.w_X * feats[:, c] + params.b_X
            if kinds[c] == "binary":
                channels.append(
                    ChannelModel("binary", float(feats[:, c].mean()), params.b_X, params.w_X + params.b_X)
                )
            else:
                lo, hi = float(col.min()), float(col.max())
                if hi - lo < 1e-6:
                    hi = min(lo + 1e-6, 1 - 1e-9)
                channels.append(ChannelModel("continuous", lo=lo, hi=hi))
        return cls(schedule, domain, adj, channels, etas, K)

    def _eta_index(self, eta: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.etas, eta)
        idx = np.clip(idx, 0, len(self.etas) - 1)
        if not np.all(self.etas[idx] == eta):
            missing = sorted(set(np.asarray(eta).ravel().tolist()) - set(self.etas.tolist()))
            raise ConfigurationError(f"no statistics for concentration values {missing}")
        return idx

    def standardize(self, state: DiffusionState, eta: ConcentrationField | None = None):
        """``(value - mean) / sqrt(var)`` per entry; masked entries become 0."""
        if state.domain != self.domain:
            raise ConfigurationError(
                f"stats are for the {self.domain} domain, state is {state.domain}"
            )
        t = state.t
        if eta is None:
            if len(self.etas) != 1:
                raise ConfigurationError("a concentration field is required with several levels")
            ia = np.zeros(state.adjacency.shape, dtype=np.int64)
            ix = np.zeros(state.node_mask.shape, dtype=np.int64)
        else:
            ia = self._eta_index(eta.eta_edges)
            ix = self._eta_index(eta.eta_nodes)
        var_a = self.var_a[ia, t]
        var_x = self.var_x[ix, t, :]
        if np.any(var_a < 1e-12) or np.any(var_x < 1e-12):
            raise NumericalError(f"variance below 1e-12 at t={t}; cannot standardize")
        adj = (state.adjacency - self.mean_a[ia, t]) / np.sqrt(var_a)
        feat = (state.features - self.mean_x[ix, t, :]) / np.sqrt(var_x)
        adj = np.where(state.edge_mask(), adj, 0.0)
        feat = np.where(state.node_mask[..., None], feat, 0.0)
        return adj, feat


def standardize(state: DiffusionState, stats: PrecondStats, eta: ConcentrationField | None = None):
    return stats.standardize(state, eta)
