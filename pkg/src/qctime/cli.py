"""Command-line entry point. Exit codes: 0 pass, 1 property violation, 2 input error."""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import bch
from .bounds import bound_report
from .errors import InputError, QCTimeError
from .lie import closure, project
from .matrix_io import load_matrix, load_matrix_list, to_json_obj
from .metric import BranchSearchConfig, distance
from .numerics import Tolerances, mat_exp
from .schedule import ControlSchedule, load_schedule, propagate
from .synthesis import SynthesisConfig, synthesize_pair, synthesize_schedule

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _tol(args) -> Tolerances:
    return Tolerances(args.eq_tol, args.algebra_tol, args.conv_tol)


def _basis_from_file(path, tol):
    mats = load_matrix_list(path)
    return closure(mats, tol)


def cmd_closure(args):
    tol = _tol(args)
    gens = load_matrix_list(args.generators)
    if args.hermitian:
        gens = [1j * g for g in gens]
    basis = closure(gens, tol)
    if args.dim_only:
        print(basis.count)
        return EXIT_OK
    prov = [{"index": i, "origin": list(o)} for i, o in enumerate(basis.generator_log)]
    _emit({"dim": basis.count, "elements": [to_json_obj(E) for E in basis.elements],
           "provenance": prov})
    return EXIT_OK


def cmd_bch_coeffs(args):
    t = bch.coefficient_table(args.order)
    _emit({"order": args.order, "f": bch.fraction_json(t.f), "g": bch.fraction_json(t.g),
           "h": bch.fraction_json(t.h)})
    return EXIT_OK


def cmd_bch_compose(args):
    A, B = load_matrix(args.a), load_matrix(args.b)
    M, est = bch.bch_M(A, B, bch.coefficient_table(args.order))
    resid = float(np.linalg.norm(mat_exp(A) @ mat_exp(B) - mat_exp(M)))
    _emit({"M": to_json_obj(M), "residual": resid, "truncation_estimate": est})
    return EXIT_OK


def cmd_synthesize(args):
    tol = _tol(args)
    A, B = load_matrix(args.a), load_matrix(args.b)
    cfg = SynthesisConfig(r=args.r, d_stop=args.d_stop)
    C, tr = synthesize_pair(A, B, cfg, tol)
    exp_res = float(np.linalg.norm(mat_exp(C) - mat_exp(A) @ mat_exp(B)))
    alg_res = project(closure([A, B], tol), C)[1] if np.linalg.norm(A) + np.linalg.norm(B) > 0 else 0.0
    nC, nAB = float(np.linalg.norm(C)), float(np.linalg.norm(A) + np.linalg.norm(B))
    _emit({"C": to_json_obj(C), "norm_C": nC, "norm_A_plus_norm_B": nAB,
           "exp_residual": exp_res, "algebra_residual": alg_res, "sweeps": tr.sweeps_used,
           "n": tr.n, "m_a": tr.m_a, "m_b": tr.m_b, "restarts": tr.restarts,
           "polish_correction": tr.polish_correction})
    ok = exp_res <= 1e2 * tol.eq_tol and alg_res <= tol.algebra_tol and nC <= nAB + 10 * tol.eq_tol
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_synthesize_schedule(args):
    tol = _tol(args)
    sched = load_schedule(args.schedule)
    basis = closure([-1j * H for H, _ in sched.segments], tol)
    C_T, rhs = synthesize_schedule(sched, basis, SynthesisConfig(r=args.r), tol)
    exp_res = float(np.linalg.norm(mat_exp(-1j * C_T) - propagate(sched)))
    _emit({"C_T": to_json_obj(C_T), "norm_C_T": float(np.linalg.norm(C_T)), "bound_rhs": rhs,
           "exp_residual": exp_res, "algebra_residual": project(basis, -1j * C_T)[1]})
    return EXIT_OK if np.linalg.norm(C_T) <= rhs and exp_res <= 1e2 * tol.eq_tol else EXIT_VIOLATION


def cmd_distance(args):
    tol = _tol(args)
    U1, U2 = load_matrix(args.u1), load_matrix(args.u2)
    basis = _basis_from_file(args.algebra, tol) if args.algebra else None
    res = distance(U1, U2, basis, BranchSearchConfig(k_max=args.kmax), tol)
    _emit({"value": res.value, "argmin_C": to_json_obj(res.argmin_C), "exact": res.exact,
           "constrained": res.constrained, "candidates_examined": res.candidates_examined,
           "k": list(res.k)})
    return EXIT_OK


def cmd_bounds(args):
    tol = _tol(args)
    sched = load_schedule(args.schedule)
    target = load_matrix(args.target) if args.target else None
    basis = _basis_from_file(args.algebra, tol) if args.algebra else None
    rep = bound_report(sched, target, basis, tol=tol)
    d = rep.as_dict()
    if args.csv:
        keys = list(d)
        print(",".join(keys))
        print(",".join(format(float(d[k]), ".17g") for k in keys))
    else:
        _emit(d)
    ok = rep.T_ML <= rep.T_MT + 10 * tol.eq_tol and rep.T_MT <= rep.T_star + 10 * tol.eq_tol
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_figure1(args):
    from .zigzag import ZigzagParams, figure1_sweep, plot_rows, rows_to_csv
    p = ZigzagParams(args.a, args.b, args.c)
    rows = figure1_sweep(p, range(1, args.m_max + 1))
    text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.plot:
        plot_rows(rows, args.plot)
    ok = all(r.T_MT <= r.T_star + 1e-9 and r.T_star <= r.T_real + 1e-9 for r in rows)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_verify(args):
    from .suite import verify_suite
    log = (lambda m: print(m, file=sys.stderr)) if args.verbose else None
    rep = verify_suite(args.seed, full=args.full, tol=_tol(args), log=log)
    for name, r in rep["properties"].items():
        status = "PASS" if r["passed"] == r["total"] else "FAIL"
        print(f"{status} {name}: {r['passed']}/{r['total']}")
        for f in r["failures"]:
            print(f"    {f}")
    print(f"{'ALL PASS' if rep['ok'] else 'VIOLATIONS FOUND'} (seed {rep['seed']}, {rep['seconds']:.1f}s)")
    return EXIT_OK if rep["ok"] else EXIT_VIOLATION


def build_parser():
    ap = argparse.ArgumentParser(prog="qctime", description=__doc__)
    ap.add_argument("--eq-tol", type=float, default=1e-10)
    ap.add_argument("--algebra-tol", type=float, default=1e-8)
    ap.add_argument("--conv-tol", type=float, default=1e-12)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("closure", help="Lie closure of anti-Hermitian generators")
    p.add_argument("--generators", required=True)
    p.add_argument("--dim-only", action="store_true")
    p.add_argument("--hermitian", action="store_true", help="generators are H; close {iH}")
    p.set_defaults(fn=cmd_closure)

    p = sub.add_parser("bch", help="BCH word coefficients and composition")
    bsub = p.add_subparsers(dest="bch_command", required=True)
    q = bsub.add_parser("coeffs")
    q.add_argument("--order", type=int, default=bch.DEFAULT_BCH_ORDER)
    q.set_defaults(fn=cmd_bch_coeffs)
    q = bsub.add_parser("compose")
    q.add_argument("--a", required=True)
    q.add_argument("--b", required=True)
    q.add_argument("--order", type=int, default=bch.DEFAULT_BCH_ORDER)
    q.set_defaults(fn=cmd_bch_compose)

    p = sub.add_parser("synthesize", help="single generator for e^A e^B")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--d-stop", type=float, default=1e-10)
    p.set_defaults(fn=cmd_synthesize)

    p = sub.add_parser("synthesize-schedule", help="generator for a piecewise schedule")
    p.add_argument("--schedule", required=True)
    p.add_argument("--r", type=int, default=2)
    p.set_defaults(fn=cmd_synthesize_schedule)

    p = sub.add_parser("distance", help="algebra-constrained unitary distance")
    p.add_argument("--u1", required=True)
    p.add_argument("--u2", required=True)
    p.add_argument("--algebra")
    p.add_argument("--kmax", type=int, default=3)
    p.set_defaults(fn=cmd_distance)

    p = sub.add_parser("bounds", help="control-time bounds for a schedule")
    p.add_argument("--schedule", required=True)
    p.add_argument("--target")
    p.add_argument("--algebra")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("figure1", help="bound comparison data for the zigzag example")
    p.add_argument("--a", type=float, default=math.pi / 500)
    p.add_argument("--b", type=float, default=-math.pi / 1200)
    p.add_argument("--c", type=float, default=math.pi / 1000)
    p.add_argument("--m-max", type=int, default=500)
    p.add_argument("--out")
    p.add_argument("--plot")
    p.set_defaults(fn=cmd_figure1)

    p = sub.add_parser("verify", help="seeded property suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--full", action="store_true", help="acceptance-sized sample counts")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.fn(args)
    except (InputError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QCTimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
