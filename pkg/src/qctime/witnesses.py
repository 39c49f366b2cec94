"""Worked counterexamples: a discontinuous generator, a non-anti-Hermitian pair,
and an algebra-dependent distance."""
from __future__ import annotations

import math

import numpy as np

from .lie import closure, span_closure
from .metric import BranchSearchConfig, distance
from .numerics import DEFAULT_TOL, mat_exp
from .schedule import ControlSchedule, propagate

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


# --- switching schedule whose minimal generator jumps -----------------------

def _switch_axis(t):
    return SX if math.pi / 2 <= t < math.pi else SZ


def switching_schedule(t_end: float, steps_per_unit: int = 64) -> ControlSchedule:
    """H(t) = pi cos t * (sigma_z, or sigma_x on [pi/2, pi)) up to t_end.

    Each piece carries the exact time average of H over its interval, which
    is exact here because H keeps a fixed axis within each regime.
    """
    cuts = sorted({0.0, t_end} | {c for c in (math.pi / 2, math.pi) if c < t_end})
    segs = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        n = max(1, int(math.ceil((hi - lo) * steps_per_unit)))
        grid = np.linspace(lo, hi, n + 1)
        for t0, t1 in zip(grid[:-1], grid[1:]):
            avg = math.pi * (math.sin(t1) - math.sin(t0)) / (t1 - t0)
            segs.append((avg * _switch_axis(0.5 * (t0 + t1)), t1 - t0))
    return ControlSchedule(tuple(segs))


def switching_unitary_closed(t: float) -> np.ndarray:
    return mat_exp(-1j * math.pi * math.sin(t) * _switch_axis(t))


def switching_min_generator(t: float, cfg: BranchSearchConfig | None = None) -> np.ndarray:
    """Hermitian C with exp(-iC) = U(t) and the smallest Frobenius norm in su(2)."""
    su2 = closure([1j * SZ, 1j * SX])
    U = propagate(switching_schedule(t))
    res = distance(U, np.eye(2), su2, cfg)
    return 1j * res.argmin_C


def switching_jump(eps: float = 0.01) -> float:
    """Frobenius jump of the minimal generator across t = pi/2."""
    lo = switching_min_generator(math.pi / 2 - eps)
    hi = switching_min_generator(math.pi / 2 + eps)
    return float(np.linalg.norm(hi - lo))


# --- non-anti-Hermitian pair ------------------------------------------------

def triangular_pair():
    A = 0.5j * math.pi * np.array([[1, 1], [0, -1]], dtype=complex)
    B = 0.5j * math.pi * np.array([[1, -1], [0, -1]], dtype=complex)
    return A, B


def triangular_algebra():
    A, B = triangular_pair()
    return span_closure([A, B], DEFAULT_TOL, require_anti_hermitian=False)


def triangular_exp(a, c):
    """exp(i [[a, c], [0, -a]]) for arrays a (real) and c (complex), batched."""
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=complex)
    a, c = np.broadcast_arrays(a, c)
    out = np.zeros(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(1j * a)
    out[..., 1, 1] = np.exp(-1j * a)
    # sin(a)/a written through sinc so a = 0 is regular
    out[..., 0, 1] = 1j * c * np.sinc(a / math.pi)
    return out


def triangular_grid_min(a_range=(-10.0, 10.0), n_a=2001, c_max=10.0, n_c=81):
    """Smallest ||e^C - e^A e^B||_F over a grid of C = i[[a, c], [0, -a]]."""
    A, B = triangular_pair()
    target = mat_exp(A) @ mat_exp(B)
    a = np.linspace(*a_range, n_a)
    cr = np.linspace(-c_max, c_max, n_c)
    C = cr[:, None] + 1j * cr[None, :]
    best = np.inf
    arg = None
    for ai in a:
        E = triangular_exp(ai, C)
        r = np.linalg.norm(E - target, axis=(-2, -1))
        j = np.unravel_index(np.argmin(r), r.shape)
        if r[j] < best:
            best, arg = float(r[j]), (float(ai), complex(C[j]))
    return best, arg


# --- algebra dependence of the distance -------------------------------------

def block_algebra():
    """su(2) on the first two levels plus i diag(1, 1, -2)."""
    return closure([
        np.array([[0, 1j, 0], [1j, 0, 0], [0, 0, 0]]),
        np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]], dtype=complex),
        np.diag([1j, -1j, 0]),
        np.diag([1j, 1j, -2j]),
    ])


def line_algebra():
    return closure([np.diag([1j, 2j, -3j])])


def algebra_dependent_distances(cfg: BranchSearchConfig | None = None):
    U1 = np.diag([-1.0, 1.0, -1.0]).astype(complex)
    U2 = np.eye(3, dtype=complex)
    d1 = distance(U1, U2, block_algebra(), cfg)
    d2 = distance(U1, U2, line_algebra(), cfg)
    return d1, d2
