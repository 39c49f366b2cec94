"""Dynamical Lie algebra closure as an orthonormal real basis."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyGenerators, NotAntiHermitian
from .numerics import DEFAULT_TOL, Tolerances, anti_herm_part, is_anti_hermitian


def real_inner(X, Y) -> float:
    """Re tr(X^dagger Y)."""
    return float(np.real(np.vdot(X, Y)))


@dataclass(frozen=True)
class AlgebraBasis:
    dim_space: int
    elements: tuple
    # ("gen", i) or ("comm", i, j) referring to earlier element indices
    generator_log: tuple = field(default=())

    @property
    def count(self) -> int:
        return len(self.elements)

    def stacked(self) -> np.ndarray:
        """Real coordinate matrix, one row per element (Re and Im parts)."""
        if not self.elements:
            return np.zeros((0, 2 * self.dim_space**2))
        E = np.array(self.elements)
        flat = E.reshape(len(self.elements), -1)
        return np.concatenate([flat.real, flat.imag], axis=1)

    def coords(self, X) -> np.ndarray:
        return np.array([real_inner(E, X) for E in self.elements])

    def gram(self) -> np.ndarray:
        S = self.stacked()
        return S @ S.T


def _orthogonalize(vec, basis_list, passes: int = 2):
    for _ in range(passes):
        for E in basis_list:
            vec = vec - real_inner(E, vec) * E
    return vec


def span_closure(generators, tol: Tolerances = DEFAULT_TOL, require_anti_hermitian=True):
    """Real Lie closure of a set of matrices.

    Breadth-first over commutator depth with a fixed pair order. A new
    direction is accepted when its residual after Gram-Schmidt exceeds
    algebra_tol. With require_anti_hermitian=False any real matrix algebra
    can be closed; the inner product is the same.
    """
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if not gens:
        raise EmptyGenerators("closure needs at least one generator")
    D = gens[0].shape[0]
    for g in gens:
        if g.shape != (D, D):
            raise DimensionMismatch("generators must share one square shape")
        if require_anti_hermitian and not is_anti_hermitian(g, tol.eq_tol):
            raise NotAntiHermitian("generators must be anti-Hermitian")

    elements: list = []
    log: list = []

    def try_add(X, origin):
        # scale-aware threshold: reject directions at rounding level
        nrm = np.linalg.norm(X)
        if nrm <= tol.algebra_tol:
            return False
        v = _orthogonalize(X / nrm, elements)
        if require_anti_hermitian:
            v = anti_herm_part(v)
        res = np.linalg.norm(v)
        if res <= tol.algebra_tol:
            return False
        elements.append(v / res)
        log.append(origin)
        return True

    for i, g in enumerate(gens):
        try_add(g, ("gen", i))

    cap = D * D if require_anti_hermitian else 2 * D * D
    frontier_start = 0
    while frontier_start < len(elements) and len(elements) < cap:
        new_start = len(elements)
        for j in range(frontier_start, new_start):
            for i in range(j):
                if len(elements) >= cap:
                    break
                try_add(elements[i] @ elements[j] - elements[j] @ elements[i], ("comm", i, j))
            # pairs with later frontier elements are handled at their own j
        frontier_start = new_start
    return AlgebraBasis(D, tuple(elements), tuple(log))


def closure(generators, tol: Tolerances = DEFAULT_TOL) -> AlgebraBasis:
    """Orthonormal basis of the real Lie algebra generated by anti-Hermitian matrices."""
    return span_closure(generators, tol, require_anti_hermitian=True)


def project(basis: AlgebraBasis, X):
    """Orthogonal projection onto span(basis) and the Frobenius residual."""
    X = np.asarray(X, dtype=complex)
    if X.shape != (basis.dim_space, basis.dim_space):
        raise DimensionMismatch(f"matrix shape {X.shape} vs algebra dim {basis.dim_space}")
    X_in = np.zeros_like(X)
    for E in basis.elements:
        X_in = X_in + real_inner(E, X) * E
    return X_in, float(np.linalg.norm(X - X_in))


def contains(basis: AlgebraBasis, X, tol: Tolerances = DEFAULT_TOL) -> bool:
    return project(basis, X)[1] <= tol.algebra_tol


def residual_form(basis: AlgebraBasis) -> np.ndarray:
    """Projector onto the orthogonal complement, in real coordinates.

    For a real coordinate vector x of X (Re and Im of the flat entries),
    x @ Q @ x is the squared projection residual.
    """
    S = basis.stacked()
    return np.eye(S.shape[1]) - S.T @ S


def real_coords(X) -> np.ndarray:
    flat = np.asarray(X, dtype=complex).reshape(-1)
    return np.concatenate([flat.real, flat.imag])
