"""Alternating two-Hamiltonian example and the bound comparison over M."""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bounds import mean_dev, mt_choi_bound, poggi_bound, t_star_min_log
from .errors import DiagonalizationMismatch, InputError, ParamConstraintViolated
from .lie import AlgebraBasis, closure
from .metric import BranchSearchConfig
from .numerics import mat_exp, unitary_eig
from .schedule import ControlSchedule

CSV_HEADER = ["M", "T_real", "T_MT", "T_star", "T_P", "ratio_MT", "ratio_star", "ratio_P"]


@dataclass(frozen=True)
class ZigzagParams:
    a: float = math.pi / 500
    b: float = -math.pi / 1200
    c: float = math.pi / 1000

    def __post_init__(self):
        rho = self.rho
        if not self.a > 0:
            raise ParamConstraintViolated("a must be positive")
        if not rho < math.pi / 2:
            raise ParamConstraintViolated("sqrt(a^2 + b^2) must be below pi/2")
        th = self.theta
        if not (0 <= self.c < th < math.pi / 2):
            raise ParamConstraintViolated(f"need 0 <= c < theta < pi/2 (c={self.c}, theta={th})")

    @property
    def rho(self) -> float:
        return math.hypot(self.a, self.b)

    @property
    def theta(self) -> float:
        rho = self.rho
        return math.atan(self.a / rho * math.tan(rho))

    @property
    def scale(self) -> float:
        """sqrt(a^2 + b^2 + c^2 / 3)."""
        return math.sqrt(self.a**2 + self.b**2 + self.c**2 / 3)


def build_zigzag(p: ZigzagParams):
    a, b, c, th = p.a, p.b, p.c, p.theta
    e = np.exp(1j * th)
    A = np.array([[a, b * e, 0], [b * np.conj(e), -a, 0], [0, 0, c]], dtype=complex)
    B = np.array([[a, -b * np.conj(e), 0], [-b * e, -a, 0], [0, 0, c]], dtype=complex)
    return A, B


def zigzag_schedule(p: ZigzagParams, M: int) -> ControlSchedule:
    A, B = build_zigzag(p)
    return ControlSchedule(tuple(seg for _ in range(M) for seg in ((A, 1.0), (B, 1.0))))


def zigzag_algebra(p: ZigzagParams) -> AlgebraBasis:
    A, B = build_zigzag(p)
    return closure([1j * A, 1j * B])


def _phase_multiset_distance(p1, p2):
    """Largest unit-circle mismatch under the best pairing of two phase lists."""
    z1 = np.exp(1j * np.asarray(p1))
    z2 = np.exp(1j * np.asarray(p2))
    return min(np.max(np.abs(z1 - z2[list(perm)])) for perm in itertools.permutations(range(len(z2))))


def u_2m(p: ZigzagParams, M: int, check_tol: float = 1e-9) -> np.ndarray:
    """(e^-iB e^-iA)^M, with its eigenphases checked against {-2 theta M, 2 theta M, -2 c M}."""
    if M < 0:
        raise InputError("M must be non-negative")
    A, B = build_zigzag(p)
    cycle = mat_exp(-1j * B) @ mat_exp(-1j * A)
    U = np.linalg.matrix_power(cycle, M)
    th = p.theta
    got, _ = unitary_eig(U)
    want = [-2 * th * M, 2 * th * M, -2 * p.c * M]
    err = _phase_multiset_distance(got, want)
    if err > check_tol:
        raise DiagonalizationMismatch(f"eigenphases differ from the closed form by {err:.3g}")
    return U


def t_mt_closed(p: ZigzagParams, M: int) -> float:
    th = p.theta
    arg = abs((2 * math.cos(2 * th * M) + np.exp(-2j * p.c * M)) / 3)
    return math.sqrt(1.5) / p.scale * math.acos(min(1.0, arg))


def t_star_closed(p: ZigzagParams, M: int, window: tuple | None = None) -> float:
    """Branch minimum over integers j, k in a window containing 0 .. ceil(theta M / pi)."""
    th, c = p.theta, p.c
    if window is None:
        hi = math.ceil(max(th, c) * M / math.pi) + 2
        window = (-2, hi)
    js = np.arange(window[0], window[1] + 1)
    J, K = np.meshgrid(js, js, indexing="ij")
    val = np.sqrt((th * M - J * math.pi) ** 2 + (c * M - K * math.pi) ** 2 / 3)
    return float(2 / p.scale * val.min())


def poggi_phi_closed(p: ZigzagParams, M: int, literal: bool = False) -> float:
    """2 pi minus the largest eigenphase gap of U(2M), by cases on theta M and c M.

    The third case uses 2 pi - 2 theta M for the gap across zero; literal=True
    keeps pi - 2 theta M there instead. Past 2 theta M > 2 pi, where none of
    the cases apply, the gap is measured directly from the closed-form phases.
    """
    th, c = p.theta, p.c
    x = 2 * th * M
    if 0 <= x <= math.pi:
        half = max(math.pi - 2 * th * M, (th + c) * M)
    elif math.pi < x and 2 * (th + c) * M <= 2 * math.pi:
        half = max(2 * th * M - math.pi, math.pi - (th - c) * M)
    elif 2 * math.pi < 2 * (th + c) * M and math.pi < x <= 2 * math.pi:
        first = (math.pi if literal else 2 * math.pi) - 2 * th * M
        half = max(first, (th + c) * M - math.pi, (th - c) * M)
    else:
        ph = np.sort(np.mod([-2 * th * M, 2 * th * M, -2 * c * M], 2 * math.pi))
        gaps = np.diff(np.concatenate([ph, [ph[0] + 2 * math.pi]]))
        half = gaps.max() / 2
    return 2 * math.pi - 2 * half


def t_p_closed(p: ZigzagParams, M: int) -> float:
    phi = poggi_phi_closed(p, M)
    width = max(p.rho, p.c) + p.rho
    return min(phi, math.pi) / width


@dataclass
class FigureRow:
    M: int
    T_real: float
    T_MT: float
    T_star: float
    T_P: float

    @property
    def ratios(self):
        if self.T_real == 0:
            return (float("nan"),) * 3
        return (self.T_MT / self.T_real, self.T_star / self.T_real, self.T_P / self.T_real)

    def as_list(self):
        return [self.M, self.T_real, self.T_MT, self.T_star, self.T_P, *self.ratios]


def figure1_sweep(p: ZigzagParams | None = None, M_range=range(1, 501)):
    p = p or ZigzagParams()
    Ms = list(M_range)
    if not Ms:
        raise InputError("M range must be non-empty")
    if p.c * max(Ms) > math.pi + 1e-12:
        raise InputError("c M must not exceed pi over the range")
    return [FigureRow(M, 2.0 * M, t_mt_closed(p, M), t_star_closed(p, M), t_p_closed(p, M)) for M in Ms]


def figure1_generic(p: ZigzagParams | None = None, M_range=range(1, 501),
                    cfg: BranchSearchConfig | None = None):
    """Same rows from propagated unitaries, algebra logs and eigenphase gaps."""
    p = p or ZigzagParams()
    A, B = build_zigzag(p)
    cycle_sched = ControlSchedule(((A, 1.0), (B, 1.0)))
    cycle = mat_exp(-1j * B) @ mat_exp(-1j * A)
    basis = zigzag_algebra(p)
    rows = []
    U = np.eye(3, dtype=complex)
    Ms = list(M_range)
    for M in range(1, max(Ms) + 1):
        U = cycle @ U
        if M not in Ms:
            continue
        t_star, _ = t_star_min_log(U, cycle_sched, basis, cfg)
        rows.append(FigureRow(M, 2.0 * M, mt_choi_bound(U, cycle_sched), t_star,
                              poggi_bound(U, cycle_sched)))
    return rows


def rows_to_csv(rows, fh=None) -> str:
    buf = io.StringIO() if fh is None else fh
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.M] + [format(v, ".17g") for v in r.as_list()[1:]])
    return buf.getvalue() if fh is None else ""


def plot_rows(rows, path):  # pragma: no cover - optional output
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    M = [r.M for r in rows]
    fig, ax = plt.subplots(1, 2, figsize=(10, 4))
    ax[0].plot(M, [r.T_real for r in rows], "r-.", label="T_real")
    ax[0].plot(M, [r.T_star for r in rows], "b-", label="T*")
    ax[0].plot(M, [r.T_MT for r in rows], "k--", label="T_MT")
    ax[0].plot(M, [r.T_P for r in rows], "g--", label="T_P")
    ax[0].set_xlabel("M")
    ax[0].legend()
    for i, (lab, st) in enumerate([("T_MT", "k--"), ("T*", "b-"), ("T_P", "g--")]):
        ax[1].plot(M, [r.ratios[i] for r in rows], st, label=lab)
    ax[1].set_xlabel("M")
    ax[1].legend()
    fig.tight_layout()
    fig.savefig(path)
