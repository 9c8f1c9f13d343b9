"""Compiled inner loops shared by evaluation, rendering and fitting.

Every routine reduces in a fixed order so results are reproducible run to run.
The exponential itself is left to numpy (vectorized, much faster than a scalar
exp inside the jitted loop).
"""

import numba
import numpy as np


@numba.njit(cache=True)
def neg_quadratic(mu, A, x1, x2, out):
    """out[i, h, k] = -(x - mu_i)^T A_i (x - mu_i) with x = (x1[h], x2[k])."""
    for i in range(mu.shape[0]):
        a = A[i, 0, 0]
        c = A[i, 0, 1]
        b = A[i, 1, 1]
        for h in range(x1.shape[0]):
            d1 = x1[h] - mu[i, 0]
            qa = a * d1 * d1
            qc = 2.0 * c * d1
            for k in range(x2.shape[0]):
                d2 = x2[k] - mu[i, 1]
                out[i, h, k] = -(qa + (qc + b * d2) * d2)


@numba.njit(cache=True)
def weighted_sum(w, f, out):
    # sequential over elements so a single pixel and a full grid agree bitwise
    out[:] = 0.0
    for i in range(w.shape[0]):
        wi = w[i]
        for h in range(f.shape[1]):
            for k in range(f.shape[2]):
                out[h, k] += wi * f[i, h, k]


@numba.njit(cache=True)
def weighted_moments(mu, f, g, x1, x2, out):
    """Per element, sums of g*f times (1, d1, d2, d1^2, d1*d2, d2^2)."""
    for i in range(f.shape[0]):
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        s11 = 0.0
        s12 = 0.0
        s22 = 0.0
        for h in range(x1.shape[0]):
            d1 = x1[h] - mu[i, 0]
            r0 = 0.0
            r2 = 0.0
            r22 = 0.0
            for k in range(x2.shape[0]):
                d2 = x2[k] - mu[i, 1]
                v = f[i, h, k] * g[h, k]
                r0 += v
                r2 += v * d2
                r22 += v * d2 * d2
            s0 += r0
            s1 += r0 * d1
            s11 += r0 * d1 * d1
            s2 += r2
            s12 += r2 * d1
            s22 += r22
        out[i, 0] = s0
        out[i, 1] = s1
        out[i, 2] = s2
        out[i, 3] = s11
        out[i, 4] = s12
        out[i, 5] = s22


def responses(mu, A, x1, x2, out=None):
    """Element responses f_i on the separable grid x1 x x2, shape (N, len(x1), len(x2))."""
    if out is None:
        out = np.empty((mu.shape[0], x1.shape[0], x2.shape[0]))
    neg_quadratic(mu, A, x1, x2, out)
    np.exp(out, out=out)
    return out
