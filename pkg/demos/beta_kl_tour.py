"""Closed-form KL between Beta laws, checked against brute-force integration.

Run: python demos/beta_kl_tour.py
"""

import numpy as np
from scipy import integrate, stats

from betagraph.losses import bregman_divergence, correction_loss, sampling_loss
from betagraph.numerics import NoiseSchedule, kl_beta


def kl_by_integration(a1, b1, a2, b2):
    p, q = stats.beta(a1, b1), stats.beta(a2, b2)
    val, _ = integrate.quad(lambda x: p.pdf(x) * (p.logpdf(x) - q.logpdf(x)), 0, 1, limit=200)
    return val


for params in [(2.0, 3.0, 2.5, 2.5), (0.5, 0.5, 1.0, 1.0), (30.0, 4.0, 28.0, 5.0)]:
    print(f"KL{params}: closed form {kl_beta(*params):.12f}  integrated {kl_by_integration(*params):.12f}")

# The same number, read as a Bregman divergence of ln B(a, b)
print("Bregman view:", bregman_divergence((2.5, 2.5), (2.0, 3.0)), "=", kl_beta(2.0, 3.0, 2.5, 2.5))

# Per-entry training losses for a clean edge (0.99) and a poor guess (0.3)
s = NoiseSchedule()
t = np.array([10, 200, 500, 900])
print("t            ", t)
print("sampling KL  ", np.round(sampling_loss(0.99, 0.3, t, s, 30.0), 5))
print("correction KL", np.round(correction_loss(0.99, 0.3, t, s, 30.0), 5))
