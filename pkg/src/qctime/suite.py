"""Seeded end-to-end property suite used by the CLI `verify` command."""
from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from . import bch, instances
from .bounds import (
    choi_lift,
    max_entangled,
    ml_state_bound,
    mt_choi_bound,
    nielsen_metric_check,
    t_star_synthesized,
)
from .lie import closure, project
from .metric import verify_metric_axioms
from .numerics import DEFAULT_TOL, mat_exp
from .schedule import ControlSchedule, propagate
from .synthesis import small_time_bound, small_time_log, synthesize_pair, synthesize_schedule
from .witnesses import SX, algebra_dependent_distances, switching_jump, triangular_grid_min
from .zigzag import ZigzagParams, figure1_generic, figure1_sweep

EXACT_VALUES = {
    ("f", ()): Fraction(1), ("f", (0,)): Fraction(-1, 2), ("f", (1,)): Fraction(-1, 2),
    ("f", (0, 0)): Fraction(1, 12), ("f", (0, 1)): Fraction(-1, 6), ("f", (1, 0)): Fraction(1, 3),
    ("f", (1, 1)): Fraction(1, 12), ("g", ()): Fraction(1, 2), ("g", (0,)): Fraction(1, 12),
    ("g", (1,)): Fraction(-1, 12), ("h", ()): Fraction(-1, 12),
}

QUICK = dict(pairs=20, schedules=10, eq30=200, small=20, nielsen=20, ordering=20)
FULL = dict(pairs=200, schedules=100, eq30=1000, small=100, nielsen=100, ordering=200)


class _Tally:
    def __init__(self):
        self.results = {}

    def record(self, name, ok, detail=None):
        r = self.results.setdefault(name, {"passed": 0, "total": 0, "failures": []})
        r["total"] += 1
        if ok:
            r["passed"] += 1
        elif len(r["failures"]) < 5:
            r["failures"].append(detail)


def verify_suite(seed: int = 0, full: bool = False, tol=DEFAULT_TOL, log=None) -> dict:
    """Run every property check; deterministic for a given seed."""
    n = FULL if full else QUICK
    rng = np.random.default_rng(seed)
    t = _Tally()
    say = log or (lambda msg: None)
    t0 = time.time()

    table = bch.coefficient_table(8)
    for (kind, w), v in EXACT_VALUES.items():
        t.record("bch_exact_values", getattr(table, kind)[w] == v, (kind, w))
    say(f"bch tables done ({time.time() - t0:.1f}s)")

    for _ in range(n["pairs"]):
        A, B = instances.random_pair(rng)
        C, tr = synthesize_pair(A, B, tol=tol)
        err = np.linalg.norm(mat_exp(C) - mat_exp(A) @ mat_exp(B))
        res = project(closure([A, B], tol), C)[1]
        tri = np.linalg.norm(C) - np.linalg.norm(A) - np.linalg.norm(B)
        mono = bool(np.all(np.diff(tr.u_history) <= 1e-10))
        desc = bool(tr.descent_margins().min(initial=0.0) >= -1e-10)
        t.record("synthesis_pair", err <= 1e-8 and res <= 1e-8 and tri <= 1e-8 and mono and desc,
                 (err, res, tri, mono, desc))
    say(f"pair synthesis done ({time.time() - t0:.1f}s)")

    for _ in range(n["schedules"]):
        basis = instances.random_algebra(rng, int(rng.choice([2, 3, 4])))
        sched = instances.algebra_schedule(rng, basis)
        C_T, rhs = synthesize_schedule(sched, basis, tol=tol)
        integral = sum(dt * np.linalg.norm(H) for H, dt in sched.segments)
        res = project(basis, -1j * C_T)[1]
        exp_err = np.linalg.norm(mat_exp(-1j * C_T) - propagate(sched))
        t.record("schedule_bound", np.linalg.norm(C_T) <= integral + 1e-8 and res <= 1e-8
                 and exp_err <= 1e-8, (np.linalg.norm(C_T) - integral, res, exp_err))
    say(f"schedule synthesis done ({time.time() - t0:.1f}s)")

    gate = bch.default_constants().Delta_hat
    for _ in range(n["eq30"]):
        A, B = instances.gated_pair(rng, gate)
        lhs, rhs, _ = bch.check_norm_inequality(A, B, gate, tol=tol)
        t.record("norm_inequality", lhs <= rhs + 1e-9, (lhs, rhs))

    d1, d2 = algebra_dependent_distances()
    t.record("algebra_distance", abs(d1.value - math.sqrt(2) * math.pi) <= 1e-9, d1.value)
    t.record("algebra_distance", abs(d2.value - math.sqrt(14) * math.pi) <= 1e-9, d2.value)
    su2 = closure([1j * SX, np.array([[1j, 0], [0, -1j]])])
    sample = [mat_exp(sum(rng.normal() * E for E in su2.elements)) for _ in range(6)]
    rep = verify_metric_axioms(sample, su2, tol=tol)
    t.record("metric_axioms", rep["ok"], rep["violations"][:3])

    p = ZigzagParams()
    rows = figure1_sweep(p)
    gen = figure1_generic(p)
    for r, g in zip(rows, gen):
        t.record("figure_ordering", r.T_MT <= r.T_star + 1e-9 and r.T_star <= r.T_real + 1e-9, r.M)
        diff = max(abs(r.T_MT - g.T_MT), abs(r.T_star - g.T_star), abs(r.T_P - g.T_P))
        t.record("figure_closed_vs_generic", diff <= 1e-8, (r.M, diff))
    t.record("figure_gap_at_250", rows[249].T_star / rows[249].T_MT > 1, rows[249].as_list())
    say(f"figure data done ({time.time() - t0:.1f}s)")

    for _ in range(n["small"]):
        sched = instances.small_time_schedule(rng, int(rng.choice([2, 3, 4])))
        _, defect = small_time_log(sched)
        t.record("small_time_log", defect <= small_time_bound(sched), defect)
    for _ in range(n["nielsen"]):
        sa, sb = instances.schedule_pair_same_grid(rng, int(rng.choice([2, 3])))
        d, frob, rhs = nielsen_metric_check(sa, sb, tol=tol)
        t.record("nielsen_chain", frob <= d + 1e-9 and d <= rhs + 1e-9, (frob, d, rhs))
    for tt in (0.5, 1.0, 2.0):
        sa = ControlSchedule(((SX, tt),))
        sb = ControlSchedule(((np.zeros((2, 2)), tt),))
        d, frob, rhs = nielsen_metric_check(sa, sb, su2, tol=tol)
        ok = (abs(frob - 2 * math.sqrt(2) * math.sin(tt / 2)) <= 1e-12
              and abs(rhs - math.sqrt(2) * tt) <= 1e-12 and frob <= rhs)
        t.record("nielsen_sigma_x", ok, (tt, frob, d, rhs))

    t.record("switching_jump", switching_jump() > math.pi / 2)
    best, _ = triangular_grid_min()
    t.record("triangular_grid", best >= 1e-6, best)
    say(f"witnesses done ({time.time() - t0:.1f}s)")

    for _ in range(n["ordering"]):
        D = int(rng.choice([2, 3, 4]))
        sched = instances.random_schedule(rng, D, (1, 3), scale=0.7)
        U = propagate(sched)
        t_mt = mt_choi_bound(U, sched)
        t_ml = ml_state_bound(choi_lift(sched), max_entangled(D))
        t_star, _ = t_star_synthesized(sched, tol=tol)
        ok = t_ml <= t_mt + 1e-9 and t_mt <= t_star + 1e-9 and t_star <= sched.total_time + 1e-9
        t.record("bound_ordering", ok, (t_ml, t_mt, t_star, sched.total_time))
    say(f"bound ordering done ({time.time() - t0:.1f}s)")

    ok = all(r["passed"] == r["total"] for r in t.results.values())
    return {"seed": seed, "full": full, "ok": ok, "properties": t.results,
            "seconds": time.time() - t0}
