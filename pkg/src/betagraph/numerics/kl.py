"""Beta KL divergence in a cancellation-free form.

``KL(Beta(a1, b1) || Beta(a2, b2)) = D(a2; a1) + D(b2; b1) - D(a2 + b2; a1 + b1)``
with ``D(y; x) = lnG(y) - lnG(x) - (y - x) psi(x)``, the Bregman divergence of
log-gamma. Expanding ``D`` through eight recurrence shifts and the Stirling
form writes it as a sum of non-negative pieces, so a small divergence is
never the difference of two large log-gamma values. The same code runs on
numpy arrays and on torch tensors (for autograd).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from .special import _LGAMMA_COEF

_SHIFTS = 8
_SERIES_BELOW = 0.1
_TERMS = 18


def _backend(x):
    if type(x).__module__.startswith("torch"):
        import torch

        return torch
    return np


def _series(r, kind: str):
    # g(r) = log1p(r) - r       = sum_{k>=2} (-1)^(k+1) r^k / k
    # f(r) = (1+r) log1p(r) - r = sum_{k>=2} (-1)^k r^k / (k (k-1))
    acc = r * 0.0
    for k in range(_TERMS, 1, -1):
        c = (-1.0) ** (k + 1) / k if kind == "g" else (-1.0) ** k / (k * (k - 1))
        acc = acc * r + c
    return acc * r * r


def _g(r, xp):
    small = xp.abs(r) < _SERIES_BELOW
    zero = r * 0.0
    rs, rb = xp.where(small, r, zero), xp.where(small, zero, r)
    return xp.where(small, _series(rs, "g"), xp.log1p(rb) - rb)


def _f(r, xp):
    small = xp.abs(r) < _SERIES_BELOW
    zero = r * 0.0
    rs, rb = xp.where(small, r, zero), xp.where(small, zero, r)
    return xp.where(small, _series(rs, "f"), (1.0 + rb) * xp.log1p(rb) - rb)


def _power_gap(r, m: int, xp):
    # (1 + r)^-m - 1 + m r = sum_{j>=2} C(m+j-1, j) (-r)^j
    small = xp.abs(r) < _SERIES_BELOW
    zero = r * 0.0
    rs, rb = xp.where(small, r, zero), xp.where(small, zero, r)
    coefs = [math.comb(m + j - 1, j) * (-1.0) ** j for j in range(2, _TERMS + 8)]
    acc = rs * 0.0
    for c in reversed(coefs):
        acc = acc * rs + c
    return xp.where(small, acc * rs * rs, (1.0 + rb) ** (-m) - 1.0 + m * rb)


def _stirling_gap(x, r, xp):
    # S(x(1+r)) - S(x) - x r S'(x) with S(x) = sum_k c_k x^-(2k-1)
    out = r * 0.0
    for k, c in enumerate(_LGAMMA_COEF, start=1):
        m = 2 * k - 1
        out = out + c * x ** (-m) * _power_gap(r, m, xp)
    return out


def lgamma_bregman(y, x):
    """``lnG(y) - lnG(x) - (y - x) psi(x)`` for ``x, y > 0``, accurate when small."""
    xp = _backend(x)
    delta = y - x
    out = delta * 0.0
    for j in range(_SHIFTS):
        out = out - _g(delta / (x + j), xp)
    x8 = x + _SHIFTS
    r = delta / x8
    out = out + x8 * _f(r, xp) - 0.5 * _g(r, xp)
    return out + _stirling_gap(x8, r, xp)


def kl_beta_stable(a1, b1, a2, b2):
    """Backend-agnostic KL( Beta(a1, b1) || Beta(a2, b2) ) without checks."""
    return lgamma_bregman(a2, a1) + lgamma_bregman(b2, b1) - lgamma_bregman(a2 + b2, a1 + b1)


def kl_beta(a1, b1, a2, b2):
    """KL( Beta(a1, b1) || Beta(a2, b2) ), elementwise over broadcast inputs."""
    a1, b1, a2, b2 = (np.asarray(v, dtype=np.float64) for v in (a1, b1, a2, b2))
    for v in (a1, b1, a2, b2):
        if np.any(~(v > 0)):
            raise DomainError("beta parameters must be > 0")
    out = kl_beta_stable(a1, b1, a2, b2)
    return float(out) if np.ndim(out) == 0 else out
