"""Compiled sweep loop for the averaging chain.

Each merge replaces a neighbour pair by half the principal log of
exp(C_j) exp(C_j+1). Under the norm gate every operand is small, so a
degree-12 Taylor exponential and a Cayley-transform log series are exact
to rounding.
"""
import math

import numpy as np

try:
    import numba
    njit = numba.njit(cache=True)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(f):
        return f

EXP_DEGREE = 12
LOG_DEGREE = 8


@njit
def _mm(X, Y, out):
    D = X.shape[0]
    for i in range(D):
        for j in range(D):
            s = 0j
            for k in range(D):
                s += X[i, k] * Y[k, j]
            out[i, j] = s


@njit
def _expm_small(X, out, tmp):
    D = X.shape[0]
    deg = EXP_DEGREE
    for i in range(D):
        for j in range(D):
            out[i, j] = X[i, j] / deg
        out[i, i] += 1.0
    for k in range(deg - 1, 0, -1):
        _mm(X, out, tmp)
        for i in range(D):
            for j in range(D):
                out[i, j] = tmp[i, j] / k
            out[i, i] += 1.0


@njit
def _log_near_identity(W, out, P, K, K2, S, tmp):
    # log W = 2 artanh(K), K = (W + I)^-1 (W - I)
    D = W.shape[0]
    for i in range(D):
        for j in range(D):
            P[i, j] = W[i, j]
            K[i, j] = W[i, j]
        P[i, i] += 1.0
        K[i, i] -= 1.0
    # W + I is close to 2I, so elimination without pivoting is stable
    for c in range(D):
        piv = P[c, c]
        for r in range(c + 1, D):
            f = P[r, c] / piv
            for b in range(c, D):
                P[r, b] -= f * P[c, b]
            for b in range(D):
                K[r, b] -= f * K[c, b]
    for c in range(D - 1, -1, -1):
        for b in range(D):
            acc = K[c, b]
            for r in range(c + 1, D):
                acc -= P[c, r] * K[r, b]
            K[c, b] = acc / P[c, c]
    _mm(K, K, K2)
    deg = LOG_DEGREE
    for i in range(D):
        for j in range(D):
            S[i, j] = 0.0
        S[i, i] = 1.0 / (2 * deg + 1)
    for j in range(deg - 1, -1, -1):
        _mm(K2, S, tmp)
        for a in range(D):
            for b in range(D):
                S[a, b] = tmp[a, b]
            S[a, a] += 1.0 / (2 * j + 1)
    _mm(K, S, out)
    for a in range(D):
        for b in range(D):
            out[a, b] *= 2.0


@njit
def run_sweeps(C, d_stop, max_sweeps, gate):
    """Sweep in place until d < d_stop.

    Returns (k, u, d, max_norm, status): histories have one entry per
    evaluated sweep index; status 0 converged, 1 sweep limit, 2 gate hit.
    """
    n, D, _ = C.shape
    E1 = np.empty((D, D), np.complex128)
    E2 = np.empty_like(E1)
    W = np.empty_like(E1)
    L = np.empty_like(E1)
    t = np.empty_like(E1)
    P = np.empty_like(E1)
    K = np.empty_like(E1)
    K2 = np.empty_like(E1)
    S = np.empty_like(E1)
    cap = max_sweeps + 1
    u_hist = np.empty(cap)
    d_hist = np.empty(cap)
    nmax = np.empty(cap)
    k = 1
    while True:
        j0 = 0 if k % 2 == 1 else 1
        u = 0.0
        d = 0.0
        mx = 0.0
        for j in range(n):
            s = 0.0
            for a in range(D):
                for b in range(D):
                    s += C[j, a, b].real ** 2 + C[j, a, b].imag ** 2
            u += s
            mx = max(mx, math.sqrt(s))
        for j in range(n - 1):
            for a in range(D):
                for b in range(D):
                    z = C[j, a, b] - C[j + 1, a, b]
                    d += z.real ** 2 + z.imag ** 2
        u_hist[k - 1] = u
        d_hist[k - 1] = d
        nmax[k - 1] = mx
        if mx >= gate:
            return k, u_hist[:k], d_hist[:k], nmax[:k], 2
        if d < d_stop:
            return k, u_hist[:k], d_hist[:k], nmax[:k], 0
        if k > max_sweeps:
            return k, u_hist[:k], d_hist[:k], nmax[:k], 1
        for j in range(j0, n - 1, 2):
            _expm_small(C[j], E1, t)
            _expm_small(C[j + 1], E2, t)
            _mm(E1, E2, W)
            _log_near_identity(W, L, P, K, K2, S, t)
            for a in range(D):
                for b in range(D):
                    v = 0.25 * (L[a, b] - np.conj(L[b, a]))
                    C[j, a, b] = v
                    C[j + 1, a, b] = v
        k += 1
