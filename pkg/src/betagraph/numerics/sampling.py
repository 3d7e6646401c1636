"""Gamma, beta and logit-beta variates that stay finite for tiny shapes.

Shapes of the form ``eta * (alpha_{t-1} - alpha_t) * g0`` routinely fall to
1e-6 near the ends of the schedule. A plain Gamma draw underflows to zero
there, so everything is generated in log space: Marsaglia-Tsang
squeeze/rejection for shape >= 1 and the boosting identity
``Gamma(a) = Gamma(a + 1) * U**(1/a)`` for shape < 1.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError

RngStream = np.random.Generator

_TINY = np.finfo(np.float64).tiny
_ONE_MINUS = 1.0 - np.finfo(np.float64).epsneg


def rng_stream(seed: int, *stream_ids: int) -> np.random.Generator:
    """Counter-based (Philox) generator for ``seed`` and an optional stream path.

    Distinct ``stream_ids`` give statistically independent streams, so
    workers can derive their own generator from ``(seed, worker_id)``.
    """
    seq = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream_ids))
    return np.random.Generator(np.random.Philox(seq))


def _check_shape(shape, name="shape") -> np.ndarray:
    arr = np.asarray(shape, dtype=np.float64)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise DomainError(f"{name} must be finite and > 0")
    return arr


def _log_gamma_ge1(a: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Log of Gamma(a, 1) draws for a >= 1 (Marsaglia & Tsang, 2000)."""
    d = a - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty_like(a)
    todo = np.arange(a.size)
    d_flat, c_flat = d.ravel(), c.ravel()
    out_flat = out.ravel()
    while todo.size:
        dd, cc = d_flat[todo], c_flat[todo]
        x = rng.standard_normal(todo.size)
        v = 1.0 + cc * x
        u = rng.random(todo.size)
        ok = v > 0
        v3 = np.where(ok, v * v * v, 1.0)
        x2 = x * x
        accept = ok & (u < 1.0 - 0.0331 * x2 * x2)
        slow = ok & ~accept
        if np.any(slow):
            with np.errstate(divide="ignore"):
                accept[slow] = np.log(u[slow]) < 0.5 * x2[slow] + dd[slow] * (
                    1.0 - v3[slow] + np.log(v3[slow])
                )
        out_flat[todo[accept]] = np.log(dd[accept]) + np.log(v3[accept])
        todo = todo[~accept]
    return out_flat.reshape(a.shape)


def sample_log_gamma(shape, rng: np.random.Generator) -> np.ndarray:
    """``ln X`` with ``X ~ Gamma(shape, 1)``; finite even for shape << 1."""
    a = _check_shape(shape)
    scalar = a.ndim == 0
    a = np.atleast_1d(a)
    boost = a < 1.0
    out = _log_gamma_ge1(np.where(boost, a + 1.0, a), rng)
    if np.any(boost):
        # 1 - U lies in (0, 1], so the log is finite
        u = 1.0 - rng.random(int(boost.sum()))
        out[boost] += np.log(u) / a[boost]
    return float(out[0]) if scalar else out


def sample_gamma(shape, rng: np.random.Generator) -> np.ndarray:
    """Gamma(shape, 1) draws; may underflow to 0 for very small shapes."""
    return np.exp(sample_log_gamma(shape, rng))


def sample_logit_beta(a, b, rng: np.random.Generator) -> np.ndarray:
    """``logit(X)`` for ``X ~ Beta(a, b)``, computed as ``ln U - ln V``."""
    a = _check_shape(a, "a")
    b = _check_shape(b, "b")
    a, b = np.broadcast_arrays(a, b)
    return sample_log_gamma(a, rng) - sample_log_gamma(b, rng)


def sample_beta(a, b, rng: np.random.Generator) -> np.ndarray:
    """Beta(a, b) draws as ``U / (U + V)``, clipped into the open interval."""
    z = sample_logit_beta(a, b, rng)
    return np.clip(sigmoid(z), _TINY, _ONE_MINUS)


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    # exp(-logaddexp(0, -z)) never overflows
    return np.exp(-np.logaddexp(0.0, -z))


def logit(p, eps: float = 1e-6):
    """Log-odds with the input clamped to ``[eps, 1 - eps]``."""
    p = np.clip(np.asarray(p, dtype=np.float64), eps, 1.0 - eps)
    return np.log(p) - np.log1p(-p)
