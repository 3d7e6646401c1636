"""Sigmoid noise schedule ``alpha_t = sigmoid(c0 + (c1 - c0) * t / T)``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from .sampling import sigmoid


@dataclass(frozen=True)
class NoiseSchedule:
    c0: float = 10.0
    c1: float = -13.0
    T: int = 1000
    alphas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ConfigurationError(f"T must be a positive integer, got {self.T}")
        if not self.c1 < self.c0:
            raise ConfigurationError("schedule needs c1 < c0 to descend")
        t = np.arange(self.T + 1, dtype=np.float64)
        alphas = sigmoid(self.c0 + (self.c1 - self.c0) * t / self.T)
        alphas.setflags(write=False)
        object.__setattr__(self, "alphas", alphas)

    def alpha(self, t):
        """``alpha_t`` for integer ``t`` (scalar or array) in ``[0, T]``."""
        t_arr = np.asarray(t)
        if np.any(t_arr < 0) or np.any(t_arr > self.T):
            raise IndexError(f"timestep outside [0, {self.T}]: {t}")
        out = self.alphas[t_arr.astype(np.int64)]
        return float(out) if t_arr.ndim == 0 else out


def alpha(schedule: NoiseSchedule, t):
    return schedule.alpha(t)
