"""Control-time lower bounds: MT, ML, Choi-form MT, dev-based T*, Poggi, Nielsen and Lee."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDenominator, InputError, ZeroDeviation
from .lie import AlgebraBasis, closure
from .metric import BranchSearchConfig, distance, min_dev_log
from .numerics import DEFAULT_TOL, Tolerances, as_matrix, commutator, dagger, dev, unitary_eig
from .schedule import ControlSchedule, common_refinement, propagate, segment_unitary
from .synthesis import SynthesisConfig, synthesize_schedule


@dataclass
class BoundReport:
    T_real: float
    T_MT: float
    T_star: float
    T_P: float
    T_ML: float | None = None
    intermediates: dict = field(default_factory=dict)

    def as_dict(self):
        out = {"T_real": self.T_real, "T_MT": self.T_MT, "T_ML": self.T_ML,
               "T_P": self.T_P, "T_star": self.T_star}
        out.update({k: v for k, v in self.intermediates.items()})
        return out


def _normalized(psi, tol):
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1) > tol.eq_tol * 100:
        raise InputError("state vector must be normalised")
    return psi


def bures_angle(psi0, psi1) -> float:
    return float(np.arccos(min(1.0, abs(np.vdot(psi0, psi1)))))


def _ratio(angle, rate_integral, T, tol):
    if rate_integral <= tol.eq_tol:
        return 0.0 if angle <= tol.eq_tol else np.inf
    return T * angle / rate_integral


def state_trajectory(schedule: ControlSchedule, psi0):
    """States at the start of each segment and the final state."""
    psi = np.asarray(psi0, dtype=complex)
    states = [psi]
    for H, dt in schedule.segments:
        psi = segment_unitary(H, dt) @ psi
        states.append(psi)
    return states


def _energy_spread(H, psi):
    e1 = np.real(np.vdot(psi, H @ psi))
    e2 = np.real(np.vdot(H @ psi, H @ psi))
    return float(np.sqrt(max(e2 - e1 * e1, 0.0)))


def mt_state_bound(schedule: ControlSchedule, psi0, tol: Tolerances = DEFAULT_TOL) -> float:
    """tau * arccos|<psi0|psi_tau>| / int Delta H dt.

    Delta H is conserved within each constant segment, so the integral is
    a sum of duration times the spread at the segment start.
    """
    psi0 = _normalized(psi0, tol)
    states = state_trajectory(schedule, psi0)
    integral = sum(dt * _energy_spread(H, s) for (H, dt), s in zip(schedule.segments, states))
    return _ratio(bures_angle(psi0, states[-1]), integral, schedule.total_time, tol)


def aa_path_length(schedule: ControlSchedule, psi0) -> float:
    """Fubini-Study length 2 int Delta H dt of the state path."""
    states = state_trajectory(schedule, np.asarray(psi0, dtype=complex))
    return 2 * sum(dt * _energy_spread(H, s) for (H, dt), s in zip(schedule.segments, states))


def ml_state_bound(schedule: ControlSchedule, psi0, tol: Tolerances = DEFAULT_TOL) -> float:
    """tau sin^2(angle) / (2 int sqrt<H'^2> dt), H' shifted to a zero ground energy."""
    psi0 = _normalized(psi0, tol)
    states = state_trajectory(schedule, psi0)
    integral = 0.0
    for (H, dt), s in zip(schedule.segments, states):
        Hs = H - np.linalg.eigvalsh(H)[0] * np.eye(len(H))
        integral += dt * float(np.linalg.norm(Hs @ s))
    angle = bures_angle(psi0, states[-1])
    return _ratio(np.sin(angle) ** 2 / 2, integral, schedule.total_time, tol)


def max_entangled(D: int) -> np.ndarray:
    return np.eye(D, dtype=complex).reshape(-1) / np.sqrt(D)


def choi_lift(schedule: ControlSchedule) -> ControlSchedule:
    """Schedule of I (x) H acting on the doubled space."""
    D = schedule.dim
    return schedule.shifted(lambda H: np.kron(np.eye(D), H))


def mean_dev(schedule: ControlSchedule) -> float:
    """Time-averaged dev H."""
    return sum(dt * dev(H) for H, dt in schedule.segments) / schedule.total_time


def mt_choi_bound(U_target, schedule: ControlSchedule, tol: Tolerances = DEFAULT_TOL) -> float:
    """arccos|tr U / D| divided by the time-averaged dev H."""
    U = as_matrix(U_target)
    angle = float(np.arccos(min(1.0, abs(np.trace(U)) / len(U))))
    return _ratio(angle, mean_dev(schedule), 1.0, tol)


def t_star_bound(C_T, schedule: ControlSchedule, tol: Tolerances = DEFAULT_TOL) -> float:
    """dev C_T over the time-averaged dev H."""
    dC = dev(C_T, tol.eq_tol * max(1.0, np.abs(C_T).max()))
    dH = mean_dev(schedule)
    if dH <= tol.eq_tol:
        if dC <= tol.eq_tol:
            return 0.0
        raise ZeroDeviation("schedule has zero deviation but the target does not")
    return dC / dH


def traceless_schedule(schedule: ControlSchedule) -> ControlSchedule:
    return schedule.shifted(lambda H: H - np.trace(H).real / len(H) * np.eye(len(H)))


def t_star_synthesized(schedule: ControlSchedule, cfg: SynthesisConfig | None = None,
                       tol: Tolerances = DEFAULT_TOL):
    """T* from a synthesized generator of the traceless-shifted schedule.

    Returns (T_star, C_T). The shifted propagator differs from the original
    by a global phase only, and dev is blind to that.
    """
    shifted = traceless_schedule(schedule)
    gens = [-1j * H for H, _ in shifted.segments if np.linalg.norm(H) > tol.algebra_tol]
    basis = closure(gens, tol) if gens else None
    C_T, _ = synthesize_schedule(shifted, basis, cfg, tol)
    return t_star_bound(C_T, schedule, tol), C_T


def t_star_min_log(U_target, schedule: ControlSchedule, basis: AlgebraBasis,
                   cfg: BranchSearchConfig | None = None, tol: Tolerances = DEFAULT_TOL):
    """T* from the dev-minimising algebra member log of the target."""
    dC, C = min_dev_log(U_target, basis, cfg, tol)
    dH = mean_dev(schedule)
    if dH <= tol.eq_tol:
        if dC <= tol.eq_tol:
            return 0.0, C
        raise ZeroDeviation("schedule has zero deviation but the target does not")
    return dC / dH, C


def eigenphase_arc(U) -> float:
    """Length of the shortest arc holding all eigenvalues (2 pi minus the largest gap)."""
    phases, _ = unitary_eig(U)
    p = np.sort(np.mod(phases, 2 * np.pi))
    gaps = np.diff(np.concatenate([p, [p[0] + 2 * np.pi]]))
    return float(2 * np.pi - gaps.max())


def min_numerical_range_modulus(U) -> float:
    """min over unit psi of |<psi|U|psi>| from the eigenvalue hull."""
    s = eigenphase_arc(U)
    return float(np.cos(s / 2)) if s < np.pi else 0.0


def mean_energy_width(schedule: ControlSchedule) -> float:
    total = 0.0
    for H, dt in schedule.segments:
        w = np.linalg.eigvalsh(H)
        total += dt * (w[-1] - w[0])
    return total / schedule.total_time


def poggi_bound(U_target, schedule: ControlSchedule, tol: Tolerances = DEFAULT_TOL) -> float:
    """2 arccos(min |<psi|U|psi>|) / (E_max - E_min), time-averaged width."""
    U = as_matrix(U_target)
    phi = eigenphase_arc(U)
    width = mean_energy_width(schedule)
    return _ratio(min(phi, np.pi), width, 1.0, tol)


def nielsen_metric_check(schedule_a: ControlSchedule, schedule_b: ControlSchedule,
                         basis: AlgebraBasis | None = None, cfg: BranchSearchConfig | None = None,
                         tol: Tolerances = DEFAULT_TOL):
    """(d(U_A, U_B), ||U_A - U_B||_F, int ||H_A - H_B||_F dt).

    Without a basis the algebra generated by every segment Hamiltonian of
    both schedules is used.
    """
    Ua, Ub = propagate(schedule_a), propagate(schedule_b)
    if basis is None:
        gens = [-1j * H for s in (schedule_a, schedule_b) for H, _ in s.segments
                if np.linalg.norm(H) > tol.algebra_tol]
        basis = closure(gens, tol) if gens else None
    rhs = float(sum(dt * np.linalg.norm(Ha - Hb) for Ha, Hb, dt in common_refinement(schedule_a, schedule_b)))
    lhs_frob = float(np.linalg.norm(Ua - Ub))
    if basis is None:
        lhs_d = 0.0 if lhs_frob <= tol.eq_tol else distance(Ua, Ub, None, cfg, tol).value
    else:
        lhs_d = distance(Ua, Ub, basis, cfg, tol).value
    return lhs_d, lhs_frob, rhs


def lee_refined_bound(U_T, H0, V, basis: AlgebraBasis | None = None,
                      cfg: BranchSearchConfig | None = None, controls=None,
                      tol: Tolerances = DEFAULT_TOL):
    """(refined, original) = (d(U, V U V^dag), ||[U, V]||_F) / ||[H0, V]||_F.

    V should commute with every control Hamiltonian; this is checked when
    the controls are supplied.
    """
    U = as_matrix(U_T)
    V = as_matrix(V)
    den = float(np.linalg.norm(commutator(as_matrix(H0), V)))
    if den <= tol.eq_tol:
        raise DegenerateDenominator("||[H0, V]||_F vanishes")
    if controls is not None:
        for Hk in controls:
            if np.linalg.norm(commutator(Hk, V)) > 1e3 * tol.eq_tol:
                raise InputError("V does not commute with every control Hamiltonian")
    original = float(np.linalg.norm(commutator(U, V))) / den
    refined = distance(U, V @ U @ dagger(V), basis, cfg, tol).value / den
    return refined, original


def bound_report(schedule: ControlSchedule, U_target=None, basis: AlgebraBasis | None = None,
                 synth_cfg: SynthesisConfig | None = None, search_cfg: BranchSearchConfig | None = None,
                 tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """All bounds for one schedule; the target defaults to its propagator.

    T* uses the dev-minimising algebra log when a basis is given and the
    synthesized generator otherwise.
    """
    U = propagate(schedule) if U_target is None else as_matrix(U_target)
    lifted = choi_lift(schedule)
    psi = max_entangled(schedule.dim)
    T = schedule.total_time
    t_mt = mt_choi_bound(U, schedule, tol)
    t_ml = ml_state_bound(lifted, psi, tol)
    if basis is not None:
        t_star, C = t_star_min_log(U, schedule, basis, search_cfg, tol)
        C = 1j * C
    else:
        t_star, C = t_star_synthesized(schedule, synth_cfg, tol)
    inter = {
        "dev_H": mean_dev(schedule),
        "dev_C": dev((C + dagger(C)) / 2),
        "arccos_arg": float(abs(np.trace(U)) / len(U)),
        "phi": eigenphase_arc(U),
    }
    return BoundReport(T, t_mt, t_star, poggi_bound(U, schedule, tol), t_ml, inter)
