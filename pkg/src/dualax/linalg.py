"""
Summary:
Dense complex linear-algebra kernel with deterministic contracts:
ordered Hermitian eigendecomposition, positive definite square root,
Hermitian exponential, both polar decompositions and the determinant.

Matrices are plain numpy complex128 arrays; the role-specific invariants
(Hermitian, positive definite, unitary) are checked at the entry points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from dualax import config
from dualax.errors import (
    CollidingEigenvalues,
    NonHermitianInput,
    NotPositiveDefinite,
    SingularMatrix,
    ValidationError,
)

ComplexMatrix = NDArray[np.complex128]
RealVector = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """
    Summary:
    H = basis @ diag(values) @ basis^dagger with values sorted non-increasing.
    """
    values: RealVector
    basis: ComplexMatrix

    def apply(self, fn: Callable[[RealVector], NDArray]) -> ComplexMatrix:
        """Spectral calculus: basis @ diag(fn(values)) @ basis^dagger."""
        return (self.basis * fn(self.values)) @ self.basis.conj().T

    def reconstruct(self) -> ComplexMatrix:
        return self.apply(lambda lam: lam)


def as_matrix(a: ArrayLike, name: str = "matrix") -> ComplexMatrix:
    """Coerce to a finite square complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries")
    return m


def dagger(a: NDArray) -> NDArray:
    return a.conj().T


def norm_inf(a: NDArray) -> float:
    """Max row-sum norm for matrices, max-abs for vectors."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    if a.ndim == 1:
        return float(np.max(np.abs(a)))
    return float(np.linalg.norm(a, np.inf))


def hermitian_part(a: NDArray) -> ComplexMatrix:
    """X_- of the Cartan decomposition X = X_+ + X_-."""
    return 0.5 * (a + dagger(a))


def antihermitian_part(a: NDArray) -> ComplexMatrix:
    """X_+ of the Cartan decomposition X = X_+ + X_-."""
    return 0.5 * (a - dagger(a))


def hermitian_defect(a: NDArray) -> float:
    return norm_inf(a - dagger(a))


def unitarity_defect(u: NDArray) -> float:
    return norm_inf(dagger(u) @ u - np.eye(u.shape[0]))


def require_hermitian(a: ArrayLike, name: str = "matrix") -> ComplexMatrix:
    m = as_matrix(a, name)
    tol = config.active().hermiticity
    defect = hermitian_defect(m)
    if defect > tol * norm_inf(m):
        raise NonHermitianInput(f"{name} is not Hermitian: ||A - A^dagger||_inf = {defect:.3e}")
    return hermitian_part(m)


def _fix_column_phases(basis: ComplexMatrix) -> ComplexMatrix:
    # Largest-magnitude component of each eigenvector made real positive.
    idx = np.argmax(np.abs(basis), axis=0)
    pivots = basis[idx, np.arange(basis.shape[1])]
    return basis * (np.abs(pivots) / pivots)


def eigh_desc(h: ArrayLike) -> EigenDecomposition:
    """Hermitian eigendecomposition with eigenvalues sorted non-increasing."""
    m = require_hermitian(h, "Hermitian input")
    try:
        values, basis = np.linalg.eigh(m)
    except np.linalg.LinAlgError as e:
        raise NonHermitianInput(f"eigensolver failed: {e}") from e
    values = np.ascontiguousarray(values[::-1])
    basis = _fix_column_phases(np.ascontiguousarray(basis[:, ::-1]))
    return EigenDecomposition(values=values, basis=basis)


def require_simple(values: RealVector, scale: float, what: str = "spectrum") -> None:
    """Reject ordered values whose neighbouring gap is below the collision tolerance."""
    if values.size < 2:
        return
    gaps = values[:-1] - values[1:]
    limit = config.active().collision_gap * (1.0 + scale)
    worst = int(np.argmin(gaps))
    if gaps[worst] < limit:
        raise CollidingEigenvalues(
            f"{what} has colliding entries {worst + 1},{worst + 2}: gap {gaps[worst]:.3e} < {limit:.3e}"
        )


def pd_eig(p: ArrayLike, name: str = "matrix") -> EigenDecomposition:
    """eigh_desc plus the positivity check shared by the PD functions."""
    eig = eigh_desc(as_matrix(p, name))
    if eig.values[-1] <= 0.0:
        raise NotPositiveDefinite(f"{name} is not positive definite: min eigenvalue {eig.values[-1]:.3e}")
    return eig


def eigh_pd_pair(p: ArrayLike, p_inv: ArrayLike) -> EigenDecomposition:
    """
    Summary:
    Eigendecomposition of a positive definite P that comes with an accurate P^-1.

    eigh resolves each eigenvalue to about eps * lambda_max, so the small end of
    an ill-conditioned spectrum is taken from the large end of P^-1 instead.
    Pairs at or above the geometric mean of the extreme eigenvalues come from P,
    the rest from P^-1; the merged basis is re-orthonormalized.
    """
    top = pd_eig(p, "P")
    low = pd_eig(p_inv, "P^-1")
    lam_low = np.ascontiguousarray(1.0 / low.values[::-1])
    basis_low = low.basis[:, ::-1]
    cut = np.sqrt(top.values[0] * lam_low[-1])
    m = max(1, int(np.count_nonzero(top.values >= cut)))
    values = np.concatenate([top.values[:m], lam_low[m:]])
    basis, _ = np.linalg.qr(np.hstack([top.basis[:, :m], basis_low[:, m:]]))
    return EigenDecomposition(values=values, basis=_fix_column_phases(basis))


def sqrt_pd(p: ArrayLike) -> ComplexMatrix:
    """Unique positive definite square root."""
    return pd_eig(p, "PD input").apply(np.sqrt)


def pd_power(p: ArrayLike, s: float) -> ComplexMatrix:
    """P^s for positive definite P and any real s."""
    return pd_eig(p, "PD input").apply(lambda lam: lam ** s)


def herm_power(h: ArrayLike, k: int) -> ComplexMatrix:
    """Integer power of a Hermitian matrix, computed spectrally."""
    if k == 0:
        return np.eye(np.asarray(h).shape[0], dtype=np.complex128)
    eig = eigh_desc(h)
    if k < 0 and np.min(np.abs(eig.values)) == 0.0:
        raise SingularMatrix("negative power of a singular Hermitian matrix")
    return eig.apply(lambda lam: lam ** k)


def exp_herm(h: ArrayLike, t: float) -> ComplexMatrix:
    """exp(t H) for Hermitian H."""
    return eigh_desc(h).apply(lambda lam: np.exp(t * lam))


def _svd(m: ComplexMatrix) -> tuple[ComplexMatrix, RealVector, ComplexMatrix]:
    try:
        U, sigma, Vh = np.linalg.svd(m)
    except np.linalg.LinAlgError as e:
        raise SingularMatrix(f"SVD failed: {e}") from e
    # sqrt: the tolerance is stated for the spectrum of g g^dagger
    if sigma[0] == 0.0 or sigma[-1] <= np.sqrt(config.active().singular) * sigma[0]:
        raise SingularMatrix(f"matrix is numerically singular: singular values {sigma[0]:.3e} .. {sigma[-1]:.3e}")
    return U, sigma, Vh


def polar_right(g: ArrayLike) -> tuple[ComplexMatrix, ComplexMatrix]:
    """g = g_minus @ g_plus with g_minus = sqrt(g g^dagger) positive definite and g_plus unitary."""
    U, sigma, Vh = _svd(as_matrix(g, "g"))
    g_minus = hermitian_part((U * sigma) @ dagger(U))
    return g_minus, U @ Vh


def polar_left(g: ArrayLike) -> tuple[ComplexMatrix, ComplexMatrix]:
    """g = h_plus @ h_minus with h_plus unitary and h_minus = sqrt(g^dagger g) positive definite."""
    U, sigma, Vh = _svd(as_matrix(g, "g"))
    h_minus = hermitian_part((dagger(Vh) * sigma) @ Vh)
    return U @ Vh, h_minus


def det(g: ArrayLike) -> complex:
    """Determinant via LU factorization with partial pivoting (LAPACK getrf)."""
    return complex(np.linalg.det(as_matrix(g, "g")))


def logdet_pd(p: ArrayLike) -> float:
    """log det P from the Cholesky factor; keeps relative accuracy on graded positive definite P."""
    m = as_matrix(p, "PD input")
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(f"Cholesky factorization failed: {e}") from e
    return float(2.0 * np.sum(np.log(np.diag(chol).real)))
