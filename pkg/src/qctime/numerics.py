"""Dense complex matrix kernel: norms, exp/log, commutators and dev."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, NotHermitian, NotUnitary


@dataclass(frozen=True)
class Tolerances:
    eq_tol: float = 1e-10
    algebra_tol: float = 1e-8
    convergence_tol: float = 1e-12

    def __post_init__(self):
        for name in ("eq_tol", "algebra_tol", "convergence_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = Tolerances()


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def dagger(A):
    return np.conj(np.swapaxes(A, -1, -2))


def frobenius_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A, dtype=complex)))


def operator_norm(A) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(A, dtype=complex), 2))


def ad_matrix(A) -> np.ndarray:
    """Matrix of X -> AX - XA acting on row-major vec(X)."""
    A = as_matrix(A)
    I = np.eye(A.shape[0])
    return np.kron(A, I) - np.kron(I, A.T)


def ad_operator_norm(A) -> float:
    return float(np.linalg.norm(ad_matrix(A), 2))


def is_hermitian(A, tol: float = DEFAULT_TOL.eq_tol) -> bool:
    A = np.asarray(A)
    return bool(np.max(np.abs(A - dagger(A)), initial=0.0) <= tol)


def is_anti_hermitian(A, tol: float = DEFAULT_TOL.eq_tol) -> bool:
    A = np.asarray(A)
    return bool(np.max(np.abs(A + dagger(A)), initial=0.0) <= tol)


def is_unitary(U, tol: float = DEFAULT_TOL.eq_tol) -> bool:
    U = np.asarray(U)
    R = dagger(U) @ U - np.eye(U.shape[-1])
    return bool(np.max(np.abs(R), initial=0.0) <= tol)


def herm_part(A):
    return (A + dagger(A)) / 2


def anti_herm_part(A):
    return (A - dagger(A)) / 2


def mat_exp(A) -> np.ndarray:
    """Matrix exponential.

    Anti-Hermitian input goes through the eigendecomposition of the
    Hermitian matrix iA so the result is unitary to rounding.
    """
    A = as_matrix(A)
    if is_anti_hermitian(A, 1e-12 * max(1.0, np.max(np.abs(A), initial=0.0))):
        w, V = np.linalg.eigh(herm_part(1j * A))
        return (V * np.exp(-1j * w)) @ dagger(V)
    return sla.expm(A)


def unitary_eig(U):
    """Eigenphases in (-pi, pi] and an orthonormal eigenbasis of a unitary.

    Uses the complex Schur form, which is diagonal for normal matrices.
    """
    U = as_matrix(U)
    T, Z = sla.schur(U, output="complex")
    lam = np.diag(T)
    phases = np.angle(lam)
    phases = np.where(phases <= -np.pi, np.pi, phases)
    return phases, Z


def principal_log_unitary(U, tol: float = DEFAULT_TOL.eq_tol) -> np.ndarray:
    """Anti-Hermitian principal logarithm, eigenphases in (-pi, pi]."""
    U = as_matrix(U)
    if not is_unitary(U, tol):
        raise NotUnitary("principal_log_unitary requires a unitary matrix")
    phases, Z = unitary_eig(U)
    return anti_herm_part((Z * (1j * phases)) @ dagger(Z))


def commutator(A, B) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")
    return A @ B - B @ A


def dev(A, tol: float = DEFAULT_TOL.eq_tol) -> float:
    """sqrt(tr(A^2)/D - (tr(A)/D)^2) for Hermitian A."""
    A = as_matrix(A)
    if not is_hermitian(A, tol):
        raise NotHermitian("dev requires a Hermitian matrix")
    D = A.shape[0]
    w = np.linalg.eigvalsh(herm_part(A))
    return float(np.sqrt(max(np.mean(w * w) - np.mean(w) ** 2, 0.0)))


def random_anti_hermitian(rng, D: int, norm: float | None = None) -> np.ndarray:
    """Gaussian anti-Hermitian matrix, optionally scaled to a Frobenius norm."""
    G = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    X = anti_herm_part(G)
    if norm is not None:
        X = X * (norm / np.linalg.norm(X))
    return X


def random_hermitian(rng, D: int, norm: float | None = None) -> np.ndarray:
    return 1j * random_anti_hermitian(rng, D, norm)


def random_unitary(rng, D: int) -> np.ndarray:
    G = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))
