"""Exact-rational BCH word coefficients and truncated evaluation of M(A, B).

Words are tuples of bits; bit 0 stands for A and bit 1 for B. A word
c = (c1, ..., cn) indexes the monomial X_{c1} X_{c2} ... X_{cn} for f and
the nested commutator [X_{c1}, [X_{c2}, ... [X_{cn}, [A, B]]]] for g.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConvergenceGateFailed, InsufficientOrder, NormGateFailed, OrderTooLarge
from .numerics import DEFAULT_TOL, Tolerances, ad_operator_norm, anti_herm_part

F_ORDER_CAP = 10
DEFAULT_BCH_ORDER = 8
LOG2 = math.log(2.0)


def words(n: int):
    """All bit words of length n in lexicographic order."""
    return itertools.product((0, 1), repeat=n)


def _mul_trunc(p: dict, q: dict, N: int) -> dict:
    out: dict = {}
    for w1, c1 in p.items():
        room = N - len(w1)
        if room < 0:
            continue
        for w2, c2 in q.items():
            if len(w2) > room:
                continue
            w = w1 + w2
            out[w] = out.get(w, 0) + c1 * c2
    return out


@lru_cache(maxsize=None)
def _f_cached(N: int):
    # Y = e^A e^B - I as a sum of words A^p B^q / (p! q!)
    Y = {}
    for p in range(N + 1):
        for q in range(N + 1 - p):
            if p + q:
                Y[(0,) * p + (1,) * q] = Fraction(1, math.factorial(p) * math.factorial(q))
    # log(I + Y) / Y = sum_m (-1)^m Y^m / (m + 1), by Horner
    S = {(): Fraction((-1) ** N, N + 1)}
    for m in range(N - 1, -1, -1):
        S = _mul_trunc(Y, S, N)
        S[()] = S.get((), 0) + Fraction((-1) ** m, m + 1)
    return tuple(sorted((w, v) for w, v in S.items() if v != 0))


def build_f_table(N: int, cap: int = F_ORDER_CAP) -> dict:
    """Word coefficients f(c) of the series log(Z) / (Z - I), Z = e^A e^B.

    log(e^A e^B) = sum_c f(c) X_{c1} ... X_{cn} (e^A e^B - I); the values
    at length <= 2 are f() = 1, f(0) = f(1) = -1/2, f(0,1) = -1/6,
    f(1,0) = 1/3, f(0,0) = f(1,1) = 1/12. Words absent from the dict
    have coefficient zero.
    """
    if N < 0:
        raise ValueError("order must be non-negative")
    if N > cap:
        raise OrderTooLarge(f"order {N} exceeds the cap {cap}")
    return dict(_f_cached(N))


def _order_of(table: dict) -> int:
    return max((len(w) for w in table), default=0)


def build_g_h_tables(f_table: dict, f_order: int | None = None):
    """Derive g (words up to length f_order-1) and h (up to f_order-2)."""
    N = _order_of(f_table) if f_order is None else f_order
    if N < 1:
        raise InsufficientOrder("g needs an f table of order at least 1")

    def F(w):
        return f_table.get(w, Fraction(0))

    g = {}
    for n in range(N):
        sign = (-1) ** n
        for c in words(n):
            flipped = tuple(1 - x for x in c)
            g[c] = (-F(c + (1,)) - sign * F(flipped + (1,))) / (n + 2)

    h = {}
    for n in range(N - 1):
        for c in words(n):
            s = 2 * g[(1,) + c] - 2 * g[(0,) + c]
            for m in range(n + 1):
                s += (-1) ** m * g[tuple(reversed(c[:m]))] * g[c[m:]]
            h[c] = s
    return g, h


@dataclass(frozen=True)
class WordCoefficientTable:
    order: int
    f: dict
    g: dict
    h: dict


@lru_cache(maxsize=None)
def coefficient_table(order: int = DEFAULT_BCH_ORDER) -> WordCoefficientTable:
    """Tables sufficient for commutator words of length <= order."""
    f = build_f_table(order + 1)
    g, h = build_g_h_tables(f, order + 1)
    return WordCoefficientTable(order, f, g, h)


@dataclass(frozen=True)
class ConvergenceConstants:
    delta_hat: float
    Delta_hat: float
    truncation_order: int
    safety_factor: float
    h_sum: float


def delta_constants(h_table: dict, N: int, safety: float = 1.0) -> ConvergenceConstants:
    """Truncated delta and the gate Delta from the h coefficients."""
    if not 0 < safety <= 1:
        raise ValueError("safety factor must lie in (0, 1]")
    if N < 1 or any(c not in h_table for n in range(1, N + 1) for c in words(n)):
        raise InsufficientOrder(f"h table does not cover words up to length {N}")
    x = LOG2 / 3
    S = 0.0
    for n in range(1, N + 1):
        S += float(sum(abs(h_table[c]) for c in words(n))) * x**n
    delta_hat = min(1.0 / (12.0 * S), 1.0) if S > 0 else 1.0
    Delta_hat = safety * min(LOG2 / 6 * delta_hat, LOG2 / 4)
    return ConvergenceConstants(delta_hat, Delta_hat, N, safety, S)


@lru_cache(maxsize=None)
def default_constants(safety: float = 1.0) -> ConvergenceConstants:
    t = coefficient_table(DEFAULT_BCH_ORDER)
    return delta_constants(t.h, DEFAULT_BCH_ORDER - 1, safety)


def _level_coeffs(g: dict, n: int) -> np.ndarray:
    return np.array([float(g[c]) for c in words(n)])


def _tail_estimate(g: dict, N: int, x: float, y: float, w0: float) -> float:
    # exact |g| mass per level is known up to N; beyond that extrapolate the
    # per-level decay observed over the last few levels
    mass = [float(sum(abs(g[c]) for c in words(n))) for n in range(N + 1)]
    ratios = [mass[n + 1] / mass[n] for n in range(max(0, N - 3), N) if mass[n] > 0]
    q = max(ratios) if ratios else 1.0
    z = q * max(x, y)
    if z >= 1:
        return math.inf
    return w0 * mass[N] * max(x, y) ** N * z / (1 - z)


def bch_M(A, B, table: WordCoefficientTable | None = None, N: int | None = None,
          check_gate: bool = True):
    """Truncated M(A, B) = A + B + sum_c g(c) ad^c([A, B]) and a residual estimate.

    The word tree is expanded level by level: the children of a word w are
    (0,)+w and (1,)+w, with value [A, .] and [B, .] of the parent value,
    so each node costs one commutator.
    """
    if table is None:
        table = coefficient_table(DEFAULT_BCH_ORDER if N is None else N)
    N = table.order if N is None else N
    if N > table.order:
        raise InsufficientOrder(f"table order {table.order} < requested {N}")
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    x, y = ad_operator_norm(A), ad_operator_norm(B)
    if check_gate and x + y >= LOG2:
        raise ConvergenceGateFailed(
            f"||ad A|| + ||ad B|| = {x + y:.6g} >= log 2; split the operators first")
    W0 = A @ B - B @ A
    total = A + B
    level = W0[None]
    for n in range(N + 1):
        total = total + np.tensordot(_level_coeffs(table.g, n), level, axes=1)
        if n < N:
            level = np.concatenate([A @ level - level @ A, B @ level - level @ B])
    resid = _tail_estimate(table.g, N, x, y, float(np.linalg.norm(W0)))
    return total, resid


def check_norm_inequality(A, B, Delta_hat: float | None = None,
                          table: WordCoefficientTable | None = None,
                          tol: Tolerances = DEFAULT_TOL):
    """||M||^2 <= 2||A||^2 + 2||B||^2 - ||A - B||^2 under the Delta gate."""
    if Delta_hat is None:
        Delta_hat = default_constants().Delta_hat
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    na, nb = np.linalg.norm(A), np.linalg.norm(B)
    if not (na < Delta_hat and nb < Delta_hat):
        raise NormGateFailed(f"norms {na:.4g}, {nb:.4g} not below Delta {Delta_hat:.4g}")
    M, _ = bch_M(A, B, table)
    M = anti_herm_part(M)
    lhs = float(np.linalg.norm(M) ** 2)
    rhs = float(2 * na**2 + 2 * nb**2 - np.linalg.norm(A - B) ** 2)
    return lhs, rhs, lhs <= rhs + 10 * tol.eq_tol


def fraction_json(table: dict) -> dict:
    """Exact coefficients keyed by bit string ("" for the empty word)."""
    return {"".join(map(str, w)): {"num": v.numerator, "den": v.denominator}
            for w, v in sorted(table.items(), key=lambda kv: (len(kv[0]), kv[0]))}
