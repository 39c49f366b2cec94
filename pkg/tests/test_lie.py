import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qctime.errors import DimensionMismatch, EmptyGenerators, NotAntiHermitian
from qctime.lie import closure, project, span_closure
from qctime.numerics import Tolerances, mat_exp, random_anti_hermitian
from qctime.zigzag import ZigzagParams, build_zigzag, u_2m
from qctime.numerics import principal_log_unitary

from conftest import SX, SY, SZ


def rank_oracle(gens, depth=4):
    """Span dimension of all nested commutators up to a depth, by SVD rank."""
    layer = list(gens)
    pool = list(gens)
    for _ in range(depth):
        layer = [X @ Y - Y @ X for X in layer for Y in gens]
        pool += layer
    M = np.array([np.concatenate([P.real.ravel(), P.imag.ravel()]) for P in pool])
    return np.linalg.matrix_rank(M, tol=1e-9 * max(1, np.abs(M).max()))


def test_abelian_dim_one():
    assert closure([1j * SZ]).count == 1


def test_su2_dim_three():
    b = closure([1j * SX, 1j * SY])
    assert b.count == 3 == rank_oracle([1j * SX, 1j * SY])


def test_zigzag_dim_four():
    A, B = build_zigzag(ZigzagParams())
    b = closure([1j * A, 1j * B])
    assert b.count == 4 == rank_oracle([1j * A, 1j * B])
    assert b.count < 8  # strictly smaller than su(3)


def test_random_pairs_match_rank_oracle(rng):
    for D in (2, 3, 4):
        gens = [random_anti_hermitian(rng, D), random_anti_hermitian(rng, D)]
        assert closure(gens).count == rank_oracle(gens, depth=2 * D)


def test_basis_invariants(rng):
    gens = [random_anti_hermitian(rng, 3), random_anti_hermitian(rng, 3)]
    b = closure(gens)
    assert np.allclose(b.gram(), np.eye(b.count), atol=1e-8)
    for E in b.elements:
        assert np.allclose(E, -E.conj().T, atol=1e-10)
    for i, Ei in enumerate(b.elements):
        for Ej in b.elements[i + 1:]:
            assert project(b, Ei @ Ej - Ej @ Ei)[1] <= 1e-8
    assert 1 <= b.count <= 9
    for g in gens:
        assert project(b, g)[1] <= 1e-8


def test_provenance_log():
    b = closure([1j * SX, 1j * SY])
    assert b.generator_log[0] == ("gen", 0)
    assert b.generator_log[1] == ("gen", 1)
    assert b.generator_log[2] == ("comm", 0, 1)


def test_deterministic():
    a = closure([1j * SX, 1j * SY])
    b = closure([1j * SX, 1j * SY])
    assert all(np.array_equal(x, y) for x, y in zip(a.elements, b.elements))


def test_project_examples():
    b = closure([1j * SZ])
    X_in, res = project(b, b.elements[0])
    assert res == pytest.approx(0, abs=1e-15)
    X_in, res = project(b, 1j * SX)
    assert np.allclose(X_in, 0) and res == pytest.approx(np.sqrt(2))
    with pytest.raises(DimensionMismatch):
        project(b, np.eye(3))


def test_zigzag_log_in_algebra():
    p = ZigzagParams()
    A, B = build_zigzag(p)
    b = closure([1j * A, 1j * B])
    C = principal_log_unitary(u_2m(p, 7))
    assert project(b, C)[1] <= 1e-8


def test_errors():
    with pytest.raises(EmptyGenerators):
        closure([])
    with pytest.raises(NotAntiHermitian):
        closure([SX])


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_idempotence(seed):
    rng = np.random.default_rng(seed)
    D = int(rng.integers(2, 5))
    b = closure([random_anti_hermitian(rng, D) for _ in range(int(rng.integers(1, 3)))])
    b2 = closure(list(b.elements))
    assert b2.count == b.count
    for E in b2.elements:
        assert project(b, E)[1] <= 1e-8
    for E in b.elements:
        assert project(b2, E)[1] <= 1e-8


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_conjugation_covariance(seed):
    rng = np.random.default_rng(seed)
    D = int(rng.integers(2, 5))
    H1 = 1j * np.diag(rng.normal(size=D))
    b = closure([H1, random_anti_hermitian(rng, D) if rng.random() < 0.5 else H1])
    V = mat_exp(sum(rng.normal() * E for E in b.elements))
    for X in b.elements:
        assert project(b, V.conj().T @ X @ V)[1] <= 10 * 1e-8


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_monotone_in_generators(seed):
    rng = np.random.default_rng(seed)
    D = int(rng.integers(2, 5))
    gens = [random_anti_hermitian(rng, D)]
    prev = closure(gens).count
    for _ in range(2):
        gens.append(random_anti_hermitian(rng, D) if rng.random() < 0.7 else 1j * np.eye(D))
        cur = closure(gens).count
        assert cur >= prev
        prev = cur


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_traceless_cap(seed):
    rng = np.random.default_rng(seed)
    D = int(rng.integers(2, 5))
    gens = []
    for _ in range(3):
        X = random_anti_hermitian(rng, D)
        gens.append(X - np.trace(X) / D * np.eye(D))
    assert closure(gens).count <= D * D - 1


def test_general_span_closure_for_non_anti_hermitian():
    A = 0.5j * np.pi * np.array([[1, 1], [0, -1]])
    B = 0.5j * np.pi * np.array([[1, -1], [0, -1]])
    b = span_closure([A, B], Tolerances(), require_anti_hermitian=False)
    assert b.count == 3
    # i [[a, c], [0, -a]] with a real and c complex spans exactly this set
    for M in (1j * np.array([[1, 0], [0, -1]]), 1j * np.array([[0, 1], [0, 0]]),
              1j * np.array([[0, 1j], [0, 0]])):
        assert project(b, M)[1] <= 1e-10
