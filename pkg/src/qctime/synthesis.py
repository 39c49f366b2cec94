"""Single-generator synthesis for products of exponentials.

Given anti-Hermitian A, B the chain A/m_a (m_a times), B/m_b (m_b times)
is repeatedly averaged: alternate neighbour pairs are replaced by half of
their BCH composite, which keeps the ordered product fixed while the total
squared norm u never increases. When the neighbour spread d vanishes all
links agree and C = sum_j C_j satisfies e^C = e^A e^B inside the Lie
algebra generated by A and B, with ||C|| <= ||A|| + ||B||.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _chain_kernel
from .bch import DEFAULT_BCH_ORDER, ConvergenceConstants, bch_M, coefficient_table, default_constants
from .errors import (
    DimensionMismatch,
    GateRestartLimit,
    GeneratorOutsideAlgebra,
    InputError,
    MaxSweepsExceeded,
    NotAntiHermitian,
    SmallTimeGateFailed,
)
from .lie import AlgebraBasis, project
from .numerics import (
    DEFAULT_TOL,
    Tolerances,
    anti_herm_part,
    dagger,
    is_anti_hermitian,
    mat_exp,
    principal_log_unitary,
)
from .schedule import ControlSchedule, propagate


@dataclass
class SynthesisConfig:
    r: int = 2
    constants: ConvergenceConstants | None = None
    max_sweeps: int = 100_000
    d_stop: float = 1e-10
    bch_order: int = DEFAULT_BCH_ORDER
    # "log": merge via exp/log of the pair; "series": truncated word series
    merge: str = "log"
    backend: str = "auto"
    polish: bool = True
    max_restarts: int = 5
    record_products: bool = False

    def __post_init__(self):
        if self.r < 2:
            raise InputError("r must be at least 2")
        if not self.d_stop > 0:
            raise InputError("d_stop must be positive")
        if self.merge not in ("log", "series"):
            raise InputError(f"unknown merge rule {self.merge!r}")
        if self.backend not in ("auto", "numba", "numpy"):
            raise InputError(f"unknown backend {self.backend!r}")

    def gate(self) -> float:
        return (self.constants or default_constants()).Delta_hat


@dataclass
class SynthesisTrace:
    u_history: np.ndarray
    d_history: np.ndarray
    max_norm_history: np.ndarray
    sweeps_used: int
    m_a: int
    m_b: int
    n: int
    r_used: int
    Delta_used: float
    restarts: list = field(default_factory=list)
    polish_correction: float = 0.0
    final_spread: float = 0.0
    product_errors: np.ndarray | None = None

    def descent_margins(self):
        """(u_k - u_k+1) - d_k / 2 for every sweep; must be >= -tol."""
        u, d = self.u_history, self.d_history
        return (u[:-1] - u[1:]) - 0.5 * d[:-1]


def _divisions(na, nb, r, Delta):
    """Division counts with m_a odd.

    m_a is the smallest odd integer >= r ||A|| / Delta. Raising the integer r
    instead can stall when ||A|| / Delta sits just below an integer, since
    every multiple then rounds up to an even count.
    """
    mb = math.ceil(r * nb / Delta)
    if na == 0:
        return 0, mb, r
    ma = math.ceil(r * na / Delta)
    if ma % 2 == 0:
        ma += 1
    return ma, mb, r


def _merge_series(X, Y, table, N):
    out = np.empty_like(X)
    for i in range(len(X)):
        M, _ = bch_M(X[i], Y[i], table, N, check_gate=False)
        out[i] = anti_herm_part(M) / 2
    return out


def _merge_log(X, Y):
    out = np.empty_like(X)
    for i in range(len(X)):
        out[i] = principal_log_unitary(mat_exp(X[i]) @ mat_exp(Y[i])) / 2
    return out


def _run_numpy(C, cfg: SynthesisConfig, gate, target=None):
    n = len(C)
    table = coefficient_table(cfg.bch_order) if cfg.merge == "series" else None
    us, ds, mx, prods = [], [], [], []
    k = 1
    while True:
        j0 = 0 if k % 2 == 1 else 1
        norms = np.linalg.norm(C, axis=(1, 2))
        us.append(float(np.sum(norms**2)))
        ds.append(float(np.sum(np.linalg.norm(C[1:] - C[:-1], axis=(1, 2)) ** 2)) if n > 1 else 0.0)
        mx.append(float(norms.max()) if n else 0.0)
        if target is not None:
            P = np.eye(C.shape[1], dtype=complex)
            for Cj in C:
                P = P @ mat_exp(Cj)
            prods.append(float(np.linalg.norm(P - target)))
        if mx[-1] >= gate:
            status = 2
            break
        if ds[-1] < cfg.d_stop:
            status = 0
            break
        if k > cfg.max_sweeps:
            status = 1
            break
        idx = np.arange(j0, n - 1, 2)
        if len(idx):
            if cfg.merge == "series":
                Mv = _merge_series(C[idx], C[idx + 1], table, cfg.bch_order)
            else:
                Mv = _merge_log(C[idx], C[idx + 1])
            C[idx] = Mv
            C[idx + 1] = Mv
        k += 1
    return k, np.array(us), np.array(ds), np.array(mx), status, np.array(prods) if prods else None


def polish_log(C, U, iters: int = 30, tol: float = 1e-12):
    """Newton refinement of an anti-Hermitian C towards exp(C) = U.

    Corrections are phi(ad C)(log(e^-C U)) with phi(z) = z / (1 - e^-z),
    which stay in any Lie algebra containing C and log(e^-C U).
    """
    C = anti_herm_part(np.asarray(C, dtype=complex))
    for _ in range(iters):
        w, V = np.linalg.eigh((1j * C + dagger(1j * C)) / 2)
        lam = -1j * w
        E = (V * np.exp(lam)) @ dagger(V)
        R = principal_log_unitary(dagger(E) @ U, tol=1e-6)
        step = np.linalg.norm(R)
        if step == 0:
            break
        z = lam[:, None] - lam[None, :]
        if np.max(np.abs(z)) > 2 * np.pi - 0.5:
            break
        with np.errstate(invalid="ignore", divide="ignore"):
            phi = np.where(np.abs(z) < 1e-12, 1.0, z / (1 - np.exp(-z)))
        C = anti_herm_part(C + V @ (phi * (dagger(V) @ R @ V)) @ dagger(V))
        # quadratic convergence: a step below tol leaves an error far below it
        if step < tol:
            break
    return C


def synthesize_pair(A, B, cfg: SynthesisConfig | None = None, tol: Tolerances = DEFAULT_TOL):
    """Anti-Hermitian C with e^C = e^A e^B in the algebra generated by A, B."""
    cfg = cfg or SynthesisConfig()
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} are not matching square")
    scale = max(1.0, np.abs(A).max(initial=0), np.abs(B).max(initial=0))
    if not (is_anti_hermitian(A, tol.eq_tol * scale) and is_anti_hermitian(B, tol.eq_tol * scale)):
        raise NotAntiHermitian("synthesize_pair needs anti-Hermitian operands")
    A, B = anti_herm_part(A), anti_herm_part(B)
    D = A.shape[0]
    na, nb = float(np.linalg.norm(A)), float(np.linalg.norm(B))
    target = mat_exp(A) @ mat_exp(B)
    use_numba = (cfg.merge == "log" and cfg.backend != "numpy" and _chain_kernel.HAVE_NUMBA
                 and not cfg.record_products)

    Delta = cfg.gate()
    restarts = []
    for attempt in range(cfg.max_restarts + 1):
        ma, mb, r_used = _divisions(na, nb, cfg.r, Delta)
        n = ma + mb
        if n == 0:
            C = np.zeros((D, D), dtype=complex)
            trace = SynthesisTrace(np.zeros(1), np.zeros(1), np.zeros(1), 1, 0, 0, 0, r_used,
                                   Delta, restarts)
            return C, trace
        chain = np.empty((n, D, D), dtype=complex)
        chain[:ma] = A / max(ma, 1)
        chain[ma:] = B / max(mb, 1)
        if use_numba:
            k, u, d, mx, status = _chain_kernel.run_sweeps(chain, cfg.d_stop, cfg.max_sweeps, Delta)
            prods = None
        else:
            k, u, d, mx, status, prods = _run_numpy(
                chain, cfg, Delta, target if cfg.record_products else None)
        slack = 10 * tol.eq_tol
        reason = None
        if status == 2:
            reason = "gate"
        elif np.any(np.diff(u) > slack):
            reason = "u increased"
        elif len(u) > 1 and np.min((u[:-1] - u[1:]) - 0.5 * d[:-1]) < -slack:
            reason = "descent below d/2"
        if reason is None:
            if status == 1:
                raise MaxSweepsExceeded(f"d = {d[-1]:.3g} after {cfg.max_sweeps} sweeps")
            break
        restarts.append({"Delta": Delta, "reason": reason, "sweep": int(k)})
        Delta /= 2
    else:
        raise GateRestartLimit(f"gave up after {cfg.max_restarts} halvings of Delta")

    C_bar = anti_herm_part(chain.sum(axis=0))
    C = polish_log(C_bar, target, tol=tol.convergence_tol) if cfg.polish else C_bar
    spread = float(np.max(np.linalg.norm(chain - chain[0], axis=(1, 2))))
    trace = SynthesisTrace(np.asarray(u), np.asarray(d), np.asarray(mx), int(k), ma, mb, n, r_used,
                           Delta, restarts, float(np.linalg.norm(C - C_bar)), spread, prods)
    return C, trace


def synthesize_schedule(schedule: ControlSchedule, basis: AlgebraBasis | None = None,
                        cfg: SynthesisConfig | None = None, tol: Tolerances = DEFAULT_TOL):
    """Hermitian C_T with exp(-i C_T) equal to the schedule propagator.

    Folds synthesize_pair left to right over the segment generators
    -i dt H. Returns (C_T, bound_rhs) where bound_rhs = sum dt ||H||_F
    plus a rounding slack of 10 eq_tol.
    """
    if not schedule.segments:
        raise InputError("schedule must be non-empty")
    gens = [-1j * dt * H for H, dt in schedule.segments]
    if basis is not None:
        for i, X in enumerate(gens):
            res = project(basis, X)[1]
            if res > tol.algebra_tol * max(1.0, np.linalg.norm(X)):
                raise GeneratorOutsideAlgebra(f"segment {i} leaves the algebra (residual {res:.3g})")
    X = gens[0]
    for G in gens[1:]:
        X, _ = synthesize_pair(G, X, cfg, tol)
    C_T = 1j * X
    C_T = (C_T + dagger(C_T)) / 2
    bound_rhs = float(sum(dt * np.linalg.norm(H) for H, dt in schedule.segments)) + 10 * tol.eq_tol
    return C_T, bound_rhs


def small_time_log(schedule: ControlSchedule):
    """Principal log of a short-time propagator and its distance from -i int H.

    Requires alpha T <= 1/3 and beta T <= pi with alpha, beta the largest
    segment operator and Frobenius norms. The defect obeys
    defect <= 4 sqrt(D) alpha^2 T^2.
    """
    if not schedule.segments:
        raise InputError("schedule must be non-empty")
    T = schedule.total_time
    alpha = max(np.linalg.norm(H, 2) for H, _ in schedule.segments)
    beta = max(np.linalg.norm(H) for H, _ in schedule.segments)
    if alpha * T > 1 / 3 + 1e-15 or beta * T > np.pi + 1e-15:
        raise SmallTimeGateFailed(f"alpha T = {alpha * T:.4g}, beta T = {beta * T:.4g}")
    U = propagate(schedule)
    C_tilde = principal_log_unitary(U)
    integral = sum(dt * H for H, dt in schedule.segments)
    defect = float(np.linalg.norm(C_tilde + 1j * integral))
    return C_tilde, defect


def small_time_bound(schedule: ControlSchedule) -> float:
    T = schedule.total_time
    alpha = max(np.linalg.norm(H, 2) for H, _ in schedule.segments)
    return float(4 * np.sqrt(schedule.dim) * alpha**2 * T**2)
