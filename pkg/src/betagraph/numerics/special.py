"""Log-gamma, digamma and trigamma for positive real arguments.

All three shift the argument upward with the standard recurrences until it
reaches ``_SHIFT_TO`` and then evaluate an asymptotic series. With eight
shifts and the series truncated as below, the truncation error at the
switch-over point is below 1e-13 relative, so results are accurate to a few
ulps over ``[1e-6, 1e6]``.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError

_SHIFT_TO = 8.0
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)

# Stirling series for lgamma: sum_k B_2k / (2k (2k-1) z^(2k-1)).
_LGAMMA_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)
# digamma: ln z - 1/(2z) - sum_k B_2k / (2k z^(2k)).
_DIGAMMA_COEF = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
# trigamma: 1/z + 1/(2 z^2) + sum_k B_2k / z^(2k+1).
_TRIGAMMA_COEF = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)


def _as_positive(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~(arr > 0)):
        raise DomainError("argument must be > 0 (and not NaN)")
    return arr, arr.ndim == 0


def _finish(out: np.ndarray, scalar: bool):
    return float(out) if scalar else out


def log_gamma(x):
    """Natural log of the gamma function for ``x > 0``."""
    x, scalar = _as_positive(x)
    z = np.array(x, copy=True)
    # accumulate log of the product x (x+1) ... in one pass; the product
    # itself stays in range because at most 8 factors below 8 are used
    prod = np.ones_like(z)
    small = z < _SHIFT_TO
    while np.any(small):
        prod = np.where(small, prod * z, prod)
        z = np.where(small, z + 1.0, z)
        small = z < _SHIFT_TO
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    for c in reversed(_LGAMMA_COEF):
        series = series * inv2 + c
    series *= inv
    out = (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI + series - np.log(prod)
    return _finish(out, scalar)


def digamma(x):
    """Digamma function (derivative of log-gamma) for ``x > 0``."""
    x, scalar = _as_positive(x)
    z = np.array(x, copy=True)
    acc = np.zeros_like(z)
    small = z < _SHIFT_TO
    while np.any(small):
        acc = np.where(small, acc - 1.0 / z, acc)
        z = np.where(small, z + 1.0, z)
        small = z < _SHIFT_TO
    inv2 = 1.0 / (z * z)
    series = np.zeros_like(z)
    for c in reversed(_DIGAMMA_COEF):
        series = series * inv2 + c
    series *= inv2
    out = np.log(z) - 0.5 / z - series + acc
    return _finish(out, scalar)


def trigamma(x):
    """Trigamma function (second derivative of log-gamma) for ``x > 0``."""
    x, scalar = _as_positive(x)
    z = np.array(x, copy=True)
    acc = np.zeros_like(z)
    small = z < _SHIFT_TO
    while np.any(small):
        acc = np.where(small, acc + 1.0 / (z * z), acc)
        z = np.where(small, z + 1.0, z)
        small = z < _SHIFT_TO
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    for c in reversed(_TRIGAMMA_COEF):
        series = series * inv2 + c
    series *= inv2 * inv
    out = inv + 0.5 * inv2 + series + acc
    return _finish(out, scalar)


def log_beta(a, b):
    """``ln B(a, b) = lnG(a) + lnG(b) - lnG(a + b)``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)
