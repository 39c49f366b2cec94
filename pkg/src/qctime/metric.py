"""Algebra-constrained distance between unitaries by branch search.

d(U1, U2) is the smallest Frobenius norm of an algebra member C with
e^C = U1 U2^-1. Any such C commutes with W = U1 U2^-1, so it lies in the
commutant K of W inside the algebra, and after conjugation by the group
of K (which fixes W and preserves norms) it lies in one fixed maximal
torus T of K. Elements of T act as scalars on the joint eigenspaces of W
and a generic element of T, so the search runs over one 2 pi branch
shift per joint eigenspace and filters the candidates by membership.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, InputError, NoAdmissibleCandidate, NotUnitary
from .lie import AlgebraBasis, real_coords
from .numerics import DEFAULT_TOL, Tolerances, as_matrix, dagger, is_unitary, mat_exp, unitary_eig


@dataclass(frozen=True)
class BranchSearchConfig:
    k_max: int = 3
    degenerate_tol: float = 1e-9
    seed: int = 12345
    chunk: int = 200_000

    def __post_init__(self):
        if self.k_max < 0:
            raise InputError("k_max must be non-negative")


@dataclass
class DistanceResult:
    value: float
    argmin_C: np.ndarray
    candidates_examined: int
    constrained: bool
    exact: bool
    k: tuple = ()
    residual: float = 0.0


@dataclass
class BranchFrame:
    """Joint eigenspaces (projectors) with their principal phases."""
    phases: np.ndarray
    projectors: list
    sizes: np.ndarray


def _cluster(values, tol, circular=False):
    """Group indices whose values lie within tol of a neighbour (single linkage)."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            gap = abs(values[i] - values[j])
            if circular:
                gap = abs(np.exp(1j * values[i]) - np.exp(1j * values[j]))
            if gap <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _null_space_real(cols, rel_tol=1e-8):
    """Real null space of a real matrix given as a list of columns."""
    if not cols:
        return np.zeros((0, 0))
    Mx = np.stack(cols, axis=1)
    u, s, vt = np.linalg.svd(Mx, full_matrices=True)
    scale = max(1.0, s[0] if len(s) else 1.0)
    rank = int(np.sum(s > rel_tol * scale))
    return vt[rank:].T


def _torus_generic(basis: AlgebraBasis, W, rng):
    """A generic element of a maximal torus in the commutant of W."""
    E = list(basis.elements)
    Kc = _null_space_real([real_coords(X @ W - W @ X) for X in E])
    if Kc.shape[1] == 0:
        return np.zeros_like(W)
    K = [sum(c * X for c, X in zip(col, E)) for col in Kc.T]
    X = sum(rng.normal() * Ki for Ki in K)
    Tc = _null_space_real([real_coords(Ki @ X - X @ Ki) for Ki in K])
    T = [sum(c * Ki for c, Ki in zip(col, K)) for col in Tc.T]
    t = sum(rng.normal() * Ti for Ti in T)
    return t / max(np.linalg.norm(t), 1e-300)


def branch_frame(W, basis: AlgebraBasis | None, cfg: BranchSearchConfig) -> BranchFrame:
    phases, V = unitary_eig(W)
    groups = _cluster(phases, cfg.degenerate_tol, circular=True)
    t_gen = None
    if basis is not None:
        t_gen = _torus_generic(basis, W, np.random.default_rng(cfg.seed))
    out_phases, projs, sizes = [], [], []
    for g in groups:
        Vc = V[:, g]
        phase = float(np.angle(np.mean(np.exp(1j * phases[g]))))
        if phase <= -np.pi:
            phase = np.pi
        if basis is None or len(g) == 1:
            # unconstrained: every eigenvector gets its own branch
            parts = [[i] for i in range(len(g))]
            Vr = Vc
        else:
            Hc = dagger(Vc) @ (1j * t_gen) @ Vc
            w, Q = np.linalg.eigh((Hc + dagger(Hc)) / 2)
            Vr = Vc @ Q
            parts = _cluster(w, 1e-7 * max(1.0, np.abs(w).max()))
        for p in parts:
            Vp = Vr[:, p]
            out_phases.append(phase)
            projs.append(Vp @ dagger(Vp))
            sizes.append(len(p))
    return BranchFrame(np.array(out_phases), projs, np.array(sizes))


def _log_from_k(frame: BranchFrame, k):
    return sum(1j * (ph + 2 * np.pi * kk) * P for ph, kk, P in zip(frame.phases, k, frame.projectors))


def search_logs(W, basis: AlgebraBasis | None, cfg: BranchSearchConfig,
                tol: Tolerances = DEFAULT_TOL, objective: str = "frobenius"):
    """Window search over branch vectors for an algebra member log of W.

    objective "frobenius" minimises ||C||_F, "dev" minimises dev(iC).
    Returns (value, C, k, examined, residual).
    """
    frame = branch_frame(W, basis, cfg)
    S = len(frame.phases)
    m = frame.sizes.astype(float)
    x0 = real_coords(_log_from_k(frame, [0] * S))
    Y = np.stack([real_coords(2j * np.pi * P) for P in frame.projectors], axis=1)
    if basis is not None:
        B = basis.stacked()
        Qx0 = x0 - B.T @ (B @ x0)
        QY = Y - B.T @ (B @ Y)
    rng = range(-cfg.k_max, cfg.k_max + 1)
    best = None
    examined = 0
    it = itertools.product(rng, repeat=S)
    Dn = float(m.sum())
    while True:
        block = list(itertools.islice(it, cfg.chunk))
        if not block:
            break
        k = np.array(block, dtype=float)
        examined += len(block)
        theta = frame.phases[None, :] + 2 * np.pi * k
        if objective == "dev":
            mean = (theta * m).sum(1) / Dn
            val2 = np.maximum((theta**2 * m).sum(1) / Dn - mean**2, 0.0)
        else:
            val2 = (theta**2 * m).sum(1)
        if basis is not None:
            R = Qx0[None, :] + k @ QY.T
            res = np.linalg.norm(R, axis=1)
            ok = res <= tol.algebra_tol
        else:
            res = np.zeros(len(block))
            ok = np.ones(len(block), bool)
        if not ok.any():
            continue
        idx = np.flatnonzero(ok)
        vmin = val2[idx].min()
        # ties within rounding resolved by the first (lexicographic) k
        j = idx[np.flatnonzero(val2[idx] <= vmin + 1e-12 * max(1.0, vmin))[0]]
        cand = (float(np.sqrt(val2[j])), tuple(int(v) for v in k[j]), float(res[j]))
        if best is None or cand[0] < best[0] - 1e-12 * max(1.0, best[0]):
            best = cand
    if best is None:
        raise NoAdmissibleCandidate(
            f"no algebra member log of U1 U2^-1 with branch shifts in [-{cfg.k_max}, {cfg.k_max}]")
    value, k, res = best
    C = _log_from_k(frame, k)
    return value, C, k, examined, res


def _check_pair(U1, U2, tol):
    U1 = as_matrix(U1)
    U2 = as_matrix(U2)
    if U1.shape != U2.shape:
        raise DimensionMismatch(f"shapes {U1.shape} and {U2.shape} differ")
    for U in (U1, U2):
        if not is_unitary(U, tol.eq_tol):
            raise NotUnitary("distance needs unitary arguments")
    return U1, U2


def distance(U1, U2, basis: AlgebraBasis | None = None, cfg: BranchSearchConfig | None = None,
             tol: Tolerances = DEFAULT_TOL) -> DistanceResult:
    """Smallest ||C||_F over algebra members C with e^C = U1 U2^-1.

    exact is set when the value is below (2 k_max + 1) pi: every branch
    vector outside the window has a shift of size at least that much, so
    the window minimum is then the global one.
    """
    cfg = cfg or BranchSearchConfig()
    U1, U2 = _check_pair(U1, U2, tol)
    W = U1 @ dagger(U2)
    value, C, k, examined, res = search_logs(W, basis, cfg, tol)
    exact = value < (2 * cfg.k_max + 1) * np.pi - 1e-9
    return DistanceResult(value, C, examined, basis is not None, bool(exact), k, res)


def min_dev_log(U, basis: AlgebraBasis | None = None, cfg: BranchSearchConfig | None = None,
                tol: Tolerances = DEFAULT_TOL):
    """Algebra member log C of U minimising dev(iC); returns (dev, C)."""
    cfg = cfg or BranchSearchConfig()
    U = as_matrix(U)
    if not is_unitary(U, tol.eq_tol):
        raise NotUnitary("min_dev_log needs a unitary")
    value, C, _, _, _ = search_logs(U, basis, cfg, tol, objective="dev")
    return value, C


def verify_metric_axioms(sample, basis: AlgebraBasis | None = None,
                         cfg: BranchSearchConfig | None = None, tol: Tolerances = DEFAULT_TOL):
    """Identity, positivity, symmetry and triangle checks over a sample."""
    cfg = cfg or BranchSearchConfig()
    n = len(sample)
    slack = 10 * tol.eq_tol
    d = np.zeros((n, n))
    report = {"identity": 0, "positivity": 0, "symmetry": 0, "triangle": 0, "violations": []}
    for i in range(n):
        for j in range(n):
            d[i, j] = distance(sample[i], sample[j], basis, cfg, tol).value
    for i in range(n):
        if d[i, i] > slack:
            report["violations"].append(("identity", i, d[i, i]))
        report["identity"] += 1
        for j in range(n):
            if i == j:
                continue
            distinct = np.linalg.norm(sample[i] - sample[j]) > 1e3 * tol.eq_tol
            if distinct and d[i, j] <= slack:
                report["violations"].append(("positivity", i, j, d[i, j]))
            report["positivity"] += 1
            if abs(d[i, j] - d[j, i]) > slack:
                report["violations"].append(("symmetry", i, j, d[i, j] - d[j, i]))
            report["symmetry"] += 1
            for l in range(n):
                if l in (i, j):
                    continue
                if d[i, l] > d[i, j] + d[j, l] + slack:
                    report["violations"].append(("triangle", i, j, l, d[i, l] - d[i, j] - d[j, l]))
                report["triangle"] += 1
    report["ok"] = not report["violations"]
    report["matrix"] = d
    return report


def conjugation_invariance_check(U1, U2, V, basis: AlgebraBasis | None = None,
                                 cfg: BranchSearchConfig | None = None,
                                 tol: Tolerances = DEFAULT_TOL, V_right=None) -> bool:
    """d(U1, U2) == d(V U1 V2, V U2 V2) for V, V2 in the algebra's group."""
    d0 = distance(U1, U2, basis, cfg, tol).value
    V2 = np.eye(len(V)) if V_right is None else V_right
    d1 = distance(V @ U1 @ V2, V @ U2 @ V2, basis, cfg, tol).value
    return abs(d0 - d1) <= 10 * tol.eq_tol


def random_group_element(basis: AlgebraBasis, rng, scale: float = 1.0):
    X = sum(rng.normal() * E for E in basis.elements)
    return mat_exp(scale * X)
