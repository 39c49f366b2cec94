import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qctime import synthesis
from qctime.errors import (
    DimensionMismatch,
    GateRestartLimit,
    GeneratorOutsideAlgebra,
    InputError,
    MaxSweepsExceeded,
    NotAntiHermitian,
    SmallTimeGateFailed,
)
from qctime.instances import algebra_schedule, random_algebra, random_pair, small_time_schedule
from qctime.lie import closure, project
from qctime.numerics import mat_exp, random_anti_hermitian
from qctime.schedule import ControlSchedule, propagate
from qctime.synthesis import (
    SynthesisConfig,
    polish_log,
    small_time_bound,
    small_time_log,
    synthesize_pair,
    synthesize_schedule,
)

from conftest import SX, SY, SZ

PAULI = (SX, SY, SZ)


def su2(v):
    """-i/2 v.sigma for a real 3-vector v (rotation by |v| about v)."""
    return -0.5j * sum(x * s for x, s in zip(v, PAULI))


def quaternion_compose(a, b):
    """Rotation vector of exp(su2(a)) exp(su2(b)) via unit quaternions."""
    def quat(v):
        th = np.linalg.norm(v)
        if th == 0:
            return 1.0, np.zeros(3)
        return np.cos(th / 2), np.sin(th / 2) * np.asarray(v) / th
    w1, v1 = quat(a)
    w2, v2 = quat(b)
    w = w1 * w2 - v1 @ v2
    v = w1 * v2 + w2 * v1 + np.cross(v1, v2)
    s = np.linalg.norm(v)
    if s == 0:
        return np.zeros(3)
    return 2 * np.arctan2(s, w) * v / s


def test_su2_axis_angle_oracle(rng):
    for _ in range(10):
        a = rng.normal(size=3)
        b = rng.normal(size=3)
        a *= rng.uniform(0, 1.2) / np.linalg.norm(a)
        b *= rng.uniform(0, 1.2) / np.linalg.norm(b)
        C, _ = synthesize_pair(su2(a), su2(b))
        assert np.linalg.norm(C - su2(quaternion_compose(a, b))) < 1e-9


def test_commuting_pair_is_sum():
    A = np.diag([0.3j, -0.1j, 0.2j])
    B = np.diag([-0.4j, 0.5j, 0.0j])
    C, tr = synthesize_pair(A, B)
    assert np.allclose(C, A + B, atol=1e-10)
    assert tr.m_a % 2 == 1


def test_zero_operands():
    Z = np.zeros((2, 2), complex)
    C, tr = synthesize_pair(Z, Z)
    assert np.allclose(C, 0) and tr.n == 0
    B = su2([0, 0, 0.7])
    C, tr = synthesize_pair(Z, B)
    assert np.allclose(C, B, atol=1e-10) and tr.m_a == 0


def test_input_errors():
    with pytest.raises(DimensionMismatch):
        synthesize_pair(np.zeros((2, 2)), np.zeros((3, 3)))
    with pytest.raises(NotAntiHermitian):
        synthesize_pair(SX, SY)
    with pytest.raises(InputError):
        SynthesisConfig(r=1)
    with pytest.raises(InputError):
        SynthesisConfig(merge="other")


def test_max_sweeps():
    with pytest.raises(MaxSweepsExceeded):
        synthesize_pair(su2([0.9, 0, 0]), su2([0, 0.9, 0]), SynthesisConfig(max_sweeps=3))


def test_gate_restart_limit(monkeypatch):
    def always_gate(C, cfg, gate, target=None):
        one = np.ones(1)
        return 1, one, one, one, 2, None
    monkeypatch.setattr(synthesis, "_run_numpy", always_gate)
    cfg = SynthesisConfig(backend="numpy", max_restarts=2)
    with pytest.raises(GateRestartLimit):
        synthesize_pair(su2([0.5, 0, 0]), su2([0, 0.5, 0]), cfg)


def test_product_conserved_every_sweep(rng):
    A, B = random_pair(rng, dims=(3,), max_norm=0.8)
    for merge in ("log", "series"):
        cfg = SynthesisConfig(backend="numpy", merge=merge, record_products=True)
        C, tr = synthesize_pair(A, B, cfg)
        assert tr.product_errors is not None
        assert np.max(tr.product_errors) < 1e-10
        assert np.linalg.norm(mat_exp(C) - mat_exp(A) @ mat_exp(B)) < 1e-10


def test_backends_agree(rng):
    A, B = random_pair(rng, dims=(4,), max_norm=1.0)
    C1, t1 = synthesize_pair(A, B, SynthesisConfig(backend="numpy"))
    C2, t2 = synthesize_pair(A, B)
    assert np.linalg.norm(C1 - C2) < 1e-9
    assert t1.n == t2.n


def test_fineness_does_not_change_result(rng):
    A, B = random_pair(rng, dims=(2,), max_norm=0.3)
    results = []
    for r in (2, 8, 32):
        C, tr = synthesize_pair(A, B, SynthesisConfig(r=r))
        assert tr.r_used >= r
        assert np.linalg.norm(C) <= np.linalg.norm(A) + np.linalg.norm(B) + 1e-8
        results.append(C)
    assert np.linalg.norm(results[0] - results[1]) < 1e-9
    assert np.linalg.norm(results[0] - results[2]) < 1e-9


def test_polish_log_converges(rng):
    X = random_anti_hermitian(rng, 3, 1.0)
    U = mat_exp(X)
    Y = polish_log(X + 1e-4 * random_anti_hermitian(rng, 3, 1.0), U)
    assert np.linalg.norm(Y - X) < 1e-11


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pair_properties(seed):
    rng = np.random.default_rng(seed)
    A, B = random_pair(rng)
    C, tr = synthesize_pair(A, B)
    assert np.linalg.norm(mat_exp(C) - mat_exp(A) @ mat_exp(B)) <= 1e-8
    assert project(closure([A, B]), C)[1] <= 1e-8
    assert np.linalg.norm(C) <= np.linalg.norm(A) + np.linalg.norm(B) + 1e-8
    assert np.all(np.diff(tr.u_history) <= 1e-10)
    assert np.all(tr.descent_margins() >= -1e-10)
    assert tr.final_spread <= np.sqrt(tr.n * tr.d_history[-1]) + 1e-12
    assert tr.max_norm_history.max() < tr.Delta_used


def test_schedule_examples():
    s = ControlSchedule.of([(0.5 * SX, 0.4), (0.3 * SZ, 0.7), (0.2 * SY, 0.5)])
    C_T, rhs = synthesize_schedule(s)
    assert np.linalg.norm(mat_exp(-1j * C_T) - propagate(s)) < 1e-8
    assert np.linalg.norm(C_T) <= rhs
    assert np.allclose(C_T, C_T.conj().T)


def test_schedule_outside_algebra():
    s = ControlSchedule.of([(SX, 0.1), (SY, 0.1)])
    with pytest.raises(GeneratorOutsideAlgebra):
        synthesize_schedule(s, closure([1j * SZ]))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_schedule_properties(seed):
    rng = np.random.default_rng(seed)
    D = int(rng.integers(2, 5))
    basis = random_algebra(rng, D)
    s = algebra_schedule(rng, basis)
    C_T, rhs = synthesize_schedule(s, basis)
    assert np.linalg.norm(C_T) <= rhs - 10 * 1e-10 + 1e-8
    assert project(basis, -1j * C_T)[1] <= 1e-8
    assert np.linalg.norm(mat_exp(-1j * C_T) - propagate(s)) <= 1e-8


def test_small_time_examples(rng):
    s = ControlSchedule.of([(0.1 * SX, 1.0), (0.1 * SZ, 1.0)])
    C, defect = small_time_log(s)
    assert defect <= small_time_bound(s)
    assert np.linalg.norm(mat_exp(C) - propagate(s)) < 1e-12
    with pytest.raises(SmallTimeGateFailed):
        small_time_log(ControlSchedule.of([(SX, 1.0)]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_small_time_property(seed):
    rng = np.random.default_rng(seed)
    s = small_time_schedule(rng, int(rng.integers(2, 5)))
    _, defect = small_time_log(s)
    assert defect <= small_time_bound(s) + 1e-12
