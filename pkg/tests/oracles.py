"""Independent reference implementations used only by the test-suite."""

from __future__ import annotations

import itertools

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import betaln, expit

# (edges, orbit of template node i)
_TEMPLATES = {
    3: [
        ([(0, 1), (1, 2)], [1, 2, 1]),
        ([(0, 1), (1, 2), (0, 2)], [3, 3, 3]),
    ],
    4: [
        ([(0, 1), (1, 2), (2, 3)], [4, 5, 5, 4]),
        ([(0, 1), (0, 2), (0, 3)], [7, 6, 6, 6]),
        ([(0, 1), (1, 2), (2, 3), (3, 0)], [8, 8, 8, 8]),
        ([(0, 1), (1, 2), (2, 0), (2, 3)], [10, 10, 11, 9]),
        ([(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)], [13, 12, 13, 12]),
        ([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], [14, 14, 14, 14]),
    ],
}


def brute_force_orbits(adjacency: np.ndarray) -> np.ndarray:
    """Orbit counts by checking every 3- and 4-subset against fixed templates."""
    a = np.asarray(adjacency)
    n = a.shape[0]
    counts = np.zeros((n, 15), dtype=np.int64)
    counts[:, 0] = a.sum(axis=1)
    for k in (3, 4):
        for subset in itertools.combinations(range(n), k):
            present = {frozenset((i, j)) for i, j in itertools.combinations(range(k), 2) if a[subset[i], subset[j]]}
            for edges, orbit in _TEMPLATES[k]:
                if len(edges) != len(present):
                    continue
                hit = None
                for perm in itertools.permutations(range(k)):
                    if {frozenset((perm[i], perm[j])) for i, j in edges} == present:
                        hit = perm
                        break
                if hit is not None:
                    for i in range(k):
                        counts[subset[hit[i]], orbit[i]] += 1
                    break
    return counts


def brute_force_betweenness(adjacency: np.ndarray) -> np.ndarray:
    """Sum over unordered pairs of the fraction of shortest paths through each node."""
    import networkx as nx

    g = nx.from_numpy_array(np.asarray(adjacency))
    n = g.number_of_nodes()
    out = np.zeros(n)
    for s, t in itertools.combinations(range(n), 2):
        if not nx.has_path(g, s, t):
            continue
        paths = list(nx.all_shortest_paths(g, s, t))
        for p in paths:
            for u in p[1:-1]:
                out[u] += 1.0 / len(paths)
    return out


def quad_kl_beta(a1, b1, a2, b2) -> float:
    """KL(Beta(a1, b1) || Beta(a2, b2)) by adaptive quadrature over y = logit(x)."""

    def logpdf(y, a, b):
        # density of logit(X) for X ~ Beta(a, b)
        return -a * np.logaddexp(0, -y) - b * np.logaddexp(0, y) - betaln(a, b)

    def integrand(y):
        lp = logpdf(y, a1, b1)
        return np.exp(lp) * (lp - logpdf(y, a2, b2))

    # centre and scale from the logit-beta mean/spread, then integrate wide
    from scipy.special import digamma, polygamma

    mu = digamma(a1) - digamma(b1)
    sd = np.sqrt(polygamma(1, a1) + polygamma(1, b1))
    pts = mu + sd * np.array([-40.0, -10.0, -3.0, 0.0, 3.0, 10.0, 40.0])
    # a tiny shape gives a tail far wider than the bulk; split the bulk out too
    bulk = np.array([-30.0, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 30.0])
    pts = np.unique(np.concatenate([pts, bulk[(bulk > pts[0]) & (bulk < pts[-1])]]))
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        val, _ = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-12, limit=400)
        total += val
    return total


def mp_bregman_log_beta(x, y, dps: int = 50) -> float:
    """``d_phi(x, y)`` for ``phi = ln B`` evaluated in ``dps``-digit arithmetic."""
    with mpmath.workdps(dps):
        a, b = (mpmath.mpf(float(v)) for v in x)
        c, d = (mpmath.mpf(float(v)) for v in y)

        def phi(p, q):
            return mpmath.loggamma(p) + mpmath.loggamma(q) - mpmath.loggamma(p + q)

        s = mpmath.digamma(c + d)
        grad = (mpmath.digamma(c) - s, mpmath.digamma(d) - s)
        return float(phi(a, b) - phi(c, d) - grad[0] * (a - c) - grad[1] * (b - d))


def wasserstein_bruteforce(p, q, width=1.0) -> float:
    """1D optimal transport cost between histograms via scipy's linear program."""
    from scipy.optimize import linprog

    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n = len(p)
    cost = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :]) * width
    a_eq = []
    for i in range(n):
        row = np.zeros((n, n)); row[i, :] = 1; a_eq.append(row.ravel())
    for j in range(n):
        col = np.zeros((n, n)); col[:, j] = 1; a_eq.append(col.ravel())
    res = linprog(cost.ravel(), A_eq=np.array(a_eq), b_eq=np.concatenate([p, q]), bounds=(0, None), method="highs")
    return float(res.fun)


def sigmoid(z):
    return expit(z)
