"""Seeded random instances shared by the tests, the acceptance run and the CLI suite."""
import numpy as np

from .lie import closure
from .numerics import random_anti_hermitian, random_hermitian
from .schedule import ControlSchedule


def random_pair(rng, dims=(2, 3, 4), max_norm=1.0):
    D = int(rng.choice(dims))
    A = random_anti_hermitian(rng, D, rng.uniform(0.0, max_norm))
    B = random_anti_hermitian(rng, D, rng.uniform(0.0, max_norm))
    return A, B


def gated_pair(rng, Delta, dims=(2, 3, 4)):
    """Pair with both Frobenius norms strictly below Delta."""
    D = int(rng.choice(dims))
    A = random_anti_hermitian(rng, D, rng.uniform(0.0, Delta) * 0.999)
    B = random_anti_hermitian(rng, D, rng.uniform(0.0, Delta) * 0.999)
    return A, B


def random_algebra(rng, D):
    """Algebra generated by two random anti-Hermitian matrices."""
    g1 = random_anti_hermitian(rng, D, 1.0)
    g2 = random_anti_hermitian(rng, D, 1.0)
    return closure([g1, g2])


def algebra_schedule(rng, basis, n_segments=(2, 4), total_norm=(0.2, 1.5)):
    """Piecewise schedule whose segments -i H lie in the algebra.

    Total integral of ||H||_F dt is drawn from total_norm.
    """
    k = int(rng.integers(n_segments[0], n_segments[1] + 1))
    Hs = []
    for _ in range(k):
        X = sum(rng.normal() * E for E in basis.elements)
        Hs.append(1j * X)
    dts = rng.uniform(0.2, 1.0, size=k)
    weight = sum(dt * np.linalg.norm(H) for H, dt in zip(Hs, dts))
    scale = rng.uniform(*total_norm) / weight
    return ControlSchedule(tuple((H * scale, dt) for H, dt in zip(Hs, dts)))


def random_schedule(rng, D, n_segments=(1, 4), scale=1.0):
    k = int(rng.integers(n_segments[0], n_segments[1] + 1))
    return ControlSchedule(tuple(
        (random_hermitian(rng, D, rng.uniform(0.1, 1.0) * scale), rng.uniform(0.1, 1.0))
        for _ in range(k)))


def small_time_schedule(rng, D, max_alpha_T=0.3):
    """Random schedule rescaled so that alpha T = max_alpha_T * u, u in (0, 1]."""
    sched = random_schedule(rng, D, (1, 4))
    T = sched.total_time
    alpha = max(np.linalg.norm(H, 2) for H, _ in sched.segments)
    target = max_alpha_T * rng.uniform(0.05, 1.0)
    s = target / (alpha * T)
    return sched.shifted(lambda H: H * s)


def schedule_pair_same_grid(rng, D, n_segments=(1, 4), scale=1.0):
    """Two schedules with a common total time and independent breakpoints."""
    a = random_schedule(rng, D, n_segments, scale)
    b = random_schedule(rng, D, n_segments, scale)
    ratio = a.total_time / b.total_time
    b = ControlSchedule(tuple((H, dt * ratio) for H, dt in b.segments))
    return a, b
