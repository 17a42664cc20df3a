"""Pure-numpy bound-constrained least-squares kernel.

Solves ``min 1/2 p'Ap - b'p  s.t. lo <= p <= hi`` for a real symmetric
positive semidefinite CSR matrix ``A`` with a monotone accelerated
projected-gradient scheme (FISTA with backtracking and a monotone
safeguard).  The compiled kernel in ``_native`` implements the same
iteration; this module is the fallback selected at import time.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def bcls_minimize(a_csr, b, lo, hi, p0, lipschitz, max_iter, tol):
    """Returns ``(p, iterations, projected_gradient_norm, converged)``."""
    b = np.asarray(b, dtype=float)

    def clip(v):
        return np.clip(v, lo, hi)

    def q(v, av):
        return 0.5 * float(v @ av) - float(b @ v)

    x = clip(np.asarray(p0, dtype=float).copy())
    ax = a_csr @ x
    fx = q(x, ax)
    pg = np.linalg.norm(x - clip(x - (ax - b)))
    if pg <= tol:
        return x, 0, pg, True

    big_l = max(float(lipschitz), 1e-300)
    y = x.copy()
    t = 1.0
    iterations = 0
    for k in range(int(max_iter)):
        iterations = k + 1
        ay = a_csr @ y
        gy = ay - b
        qy = q(y, ay)
        while True:
            z = clip(y - gy / big_l)
            dz = z - y
            az = a_csr @ z
            qz = q(z, az)
            bound = qy + float(gy @ dz) + 0.5 * big_l * float(dz @ dz)
            if qz <= bound + 1e-15 * (abs(qy) + 1.0) or big_l > 1e300:
                break
            big_l *= 2.0
        pg = np.linalg.norm(z - clip(z - (az - b)))
        # ties within f-rounding noise count as accepts, otherwise the
        # iteration can stall once f-differences drop below roundoff
        accepted = qz <= fx + 1e-15 * (abs(fx) + abs(qz))
        if accepted and pg <= tol:
            x, fx = z, qz
            break
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        if accepted:
            y = z + ((t - 1.0) / t_new) * (z - x)
            x, fx = z, qz
        else:
            y = x + (t / t_new) * (z - x)
            t_new = 1.0  # restart momentum after a rejected step
        t = t_new
    ax = a_csr @ x
    pg = np.linalg.norm(x - clip(x - (ax - b)))
    return x, iterations, pg, pg <= tol


def power_bound(a_csr, iters=80):
    """Deterministic upper estimate of the largest eigenvalue of sym PSD A."""
    n = a_csr.shape[0]
    if n == 0:
        return 1.0
    v = np.ones(n) + np.arange(n) * (1e-3 / max(n, 1))
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = a_csr @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 1e-300
        lam = float(v @ w)
        v = w / nw
    return max(lam, 1e-300) * 1.05
