"""
Summary:
Domain states, Lax matrices, orbit vectors and Hamiltonians of the
hyperbolic Sutherland model (slice S1) and the rational
Ruijsenaars-Schneider model (slice S2).

Coordinates are read as (x, y) pairs with the symplectic form sum dy ^ dx:
(q, p) on S1 and (p_hat, q_hat) on S2. Hamilton's equations are then
dx/dt = dH/dy, dy/dt = -dH/dx on both slices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from dualax import config
from dualax.errors import (
    ChamberViolation,
    IndexOutOfRange,
    NotPositiveDefinite,
    OrbitViolation,
    ValidationError,
)
from dualax.linalg import (
    ComplexMatrix,
    EigenDecomposition,
    RealVector,
    eigh_desc,
    eigh_pd_pair,
    hermitian_part,
)

OrbitVector = NDArray[np.complex128]


def _real_vector(values: ArrayLike, name: str) -> RealVector:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise ValidationError(f"{name} must be a non-empty real vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def check_chamber(x: RealVector, name: str) -> None:
    """Strictly decreasing with every gap above the chamber tolerance."""
    if x.size < 2:
        return
    gaps = x[:-1] - x[1:]
    limit = config.active().chamber_gap * (1.0 + float(np.max(np.abs(x))))
    worst = int(np.argmin(gaps))
    if gaps[worst] <= limit:
        raise ChamberViolation(
            f"{name} is not in the open Weyl chamber: {name}[{worst}] - {name}[{worst + 1}] = {gaps[worst]:.3e}"
        )


@dataclass(frozen=True)
class Coupling:
    """Coupling constant kappa and particle number n."""
    kappa: float
    n: int

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        kappa = float(self.kappa)
        if not math.isfinite(kappa) or abs(kappa) < config.active().kappa_min:
            raise ValidationError(f"kappa must be finite and non-zero, got {self.kappa!r}")
        object.__setattr__(self, "kappa", kappa)


@dataclass(frozen=True, eq=False)
class SutherlandState:
    """Point (q, p) of the Sutherland gauge slice S1."""
    q: RealVector
    p: RealVector

    MODEL: ClassVar[str] = "sutherland"

    def __post_init__(self) -> None:
        q = _real_vector(self.q, "q")
        p = _real_vector(self.p, "p")
        if q.shape != p.shape:
            raise ValidationError(f"q and p must have equal length, got {q.size} and {p.size}")
        check_chamber(q, "q")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def coords(self) -> RealVector:
        """Darboux coordinates (x, y) = (q, p)."""
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_coords(cls, xy: ArrayLike) -> "SutherlandState":
        xy = np.asarray(xy, dtype=np.float64)
        n = xy.size // 2
        return cls(q=xy[:n], p=xy[n:])


@dataclass(frozen=True, eq=False)
class RSState:
    """Point (p_hat, q_hat) of the Ruijsenaars gauge slice S2."""
    p_hat: RealVector
    q_hat: RealVector

    MODEL: ClassVar[str] = "rs"

    def __post_init__(self) -> None:
        p_hat = _real_vector(self.p_hat, "p_hat")
        q_hat = _real_vector(self.q_hat, "q_hat")
        if p_hat.shape != q_hat.shape:
            raise ValidationError(f"p_hat and q_hat must have equal length, got {p_hat.size} and {q_hat.size}")
        check_chamber(p_hat, "p_hat")
        object.__setattr__(self, "p_hat", p_hat)
        object.__setattr__(self, "q_hat", q_hat)

    @property
    def n(self) -> int:
        return self.p_hat.size

    @property
    def coords(self) -> RealVector:
        """Darboux coordinates (x, y) = (p_hat, q_hat)."""
        return np.concatenate([self.p_hat, self.q_hat])

    @classmethod
    def from_coords(cls, xy: ArrayLike) -> "RSState":
        xy = np.asarray(xy, dtype=np.float64)
        n = xy.size // 2
        return cls(p_hat=xy[:n], q_hat=xy[n:])


State = Union[SutherlandState, RSState]


def check_coupling(s: State, c: Coupling) -> None:
    if s.n != c.n:
        raise ValidationError(f"state has n={s.n} but coupling has n={c.n}")


class Family(str, Enum):
    H = "H"
    H_HAT = "Hhat"


@dataclass(frozen=True)
class HamiltonianId:
    """H_j (j >= 1) or H_hat_k (k != 0); the independent ones are j, |k| <= n."""
    family: Family
    index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))

    def validate(self) -> None:
        """H_j needs j >= 1, H_hat_k needs k != 0. Indices past n give dependent but well-defined Hamiltonians."""
        j = self.index
        ok = j >= 1 if self.family is Family.H else j != 0
        if not ok:
            raise IndexOutOfRange(f"index {j} out of range for family {self.family.value}")

    @classmethod
    def family_ids(cls, family: Family, n: int) -> list["HamiltonianId"]:
        """Indices 1..n: the independent members of the family."""
        return [cls(family, i) for i in range(1, n + 1)]

    @property
    def label(self) -> str:
        return f"{self.family.value}{self.index}"


def mu_kappa(c: Coupling) -> ComplexMatrix:
    """i kappa (1 - w w^dagger), w = (1, ..., 1)."""
    n = c.n
    return 1j * c.kappa * (np.eye(n) - np.ones((n, n)))


def orbit_defect(v: OrbitVector) -> float:
    return abs(float(np.vdot(v, v).real) - v.size)


def xi_of_v(v: ArrayLike, c: Coupling) -> ComplexMatrix:
    """xi(v) = i kappa (v v^dagger - 1) on the orbit |v|^2 = n."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (c.n,):
        raise ValidationError(f"orbit vector must have length {c.n}, got shape {v.shape}")
    if orbit_defect(v) > config.active().orbit_norm * c.n:
        raise OrbitViolation(f"|v|^2 = {np.vdot(v, v).real:.12g} deviates from n = {c.n}")
    return xi_unchecked(v, c.kappa)


def xi_unchecked(v: OrbitVector, kappa: float) -> ComplexMatrix:
    return 1j * kappa * (np.outer(v, v.conj()) - np.eye(v.size))


def lax_suth(s: SutherlandState, c: Coupling) -> ComplexMatrix:
    """L1[j,k] = p_j delta_jk - i kappa / sinh(q_j - q_k) (j != k)."""
    check_coupling(s, c)
    diffs = s.q[:, None] - s.q[None, :]
    np.fill_diagonal(diffs, np.inf)
    return np.diag(s.p) - 1j * c.kappa * (1.0 / np.sinh(diffs))


def _log_weights(p_hat: RealVector, kappa: float) -> RealVector:
    # 1/4 sum_{m != j} log(1 + 4 kappa^2 / (p_hat_j - p_hat_m)^2)
    diffs = p_hat[:, None] - p_hat[None, :]
    np.fill_diagonal(diffs, np.inf)
    return 0.25 * np.sum(np.log1p(4.0 * kappa**2 / diffs**2), axis=1)


def u_vec(s: RSState, c: Coupling) -> RealVector:
    """u_j = exp(-q_hat_j) prod_{m != j} (1 + 4 kappa^2/(p_hat_j - p_hat_m)^2)^(1/4)."""
    check_coupling(s, c)
    return np.exp(-s.q_hat + _log_weights(s.p_hat, c.kappa))


def q_hat_from_u(p_hat: RealVector, u: RealVector, kappa: float) -> RealVector:
    """Inverse of u_vec at fixed p_hat."""
    return -np.log(u) + _log_weights(p_hat, kappa)


def cauchy_factor(p_hat: RealVector, kappa: float) -> ComplexMatrix:
    """C[j,k] = 2 i kappa / (2 i kappa + p_hat_j - p_hat_k)."""
    diffs = p_hat[:, None] - p_hat[None, :]
    return 2j * kappa / (2j * kappa + diffs)


def cauchy_inverse(p_hat: RealVector, kappa: float) -> ComplexMatrix:
    """
    Closed-form inverse of cauchy_factor. With x = p_hat + i kappa, y = p_hat - i kappa,
    a(z) = prod (z - x_m), b(z) = prod (z - y_m):
    C^-1[j,k] = -a(y_j) b(x_k) / (2 i kappa (x_k - y_j) a'(x_k) b'(y_j)).
    Entries keep full relative accuracy however close the p_hat are.
    """
    x = p_hat + 1j * kappa
    y = p_hat - 1j * kappa
    b_at_x = np.prod(x[:, None] - y[None, :], axis=1)
    a_at_y = np.prod(y[:, None] - x[None, :], axis=1)
    diffs = p_hat[:, None] - p_hat[None, :]
    np.fill_diagonal(diffs, 1.0)
    slope = np.prod(diffs, axis=1)
    return -np.outer(a_at_y / slope, b_at_x / slope) / (2j * kappa * (x[None, :] - y[:, None]))


def lax_rs(s: RSState, c: Coupling) -> ComplexMatrix:
    """L2[j,k] = u_j C[j,k] u_k, positive definite on the chamber."""
    u = u_vec(s, c)
    lax = u[:, None] * cauchy_factor(s.p_hat, c.kappa) * u[None, :]
    try:
        np.linalg.cholesky(lax)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(f"L2 failed the Cholesky test: {e}") from e
    return lax


def lax_rs_inverse(s: RSState, c: Coupling) -> ComplexMatrix:
    """L2^-1 = diag(1/u) C^-1 diag(1/u), accurate where L2 itself is nearly singular."""
    inv_u = 1.0 / u_vec(s, c)
    return hermitian_part(inv_u[:, None] * cauchy_inverse(s.p_hat, c.kappa) * inv_u[None, :])


@dataclass(frozen=True, eq=False)
class RSFrame:
    """
    L2 with its eigendecomposition and u; shared by v_vec and the S2 embedding.
    The small eigenpairs come from the closed-form L2^-1 so that sqrt and v keep
    their relative accuracy when the spectrum of L2 spreads over many decades.
    """
    lax: ComplexMatrix
    eig: EigenDecomposition
    u: RealVector

    @property
    def sqrt(self) -> ComplexMatrix:
        return self.eig.apply(np.sqrt)

    @property
    def v(self) -> OrbitVector:
        return self.eig.apply(lambda lam: lam ** -0.5) @ self.u.astype(np.complex128)


def rs_frame(s: RSState, c: Coupling) -> RSFrame:
    lax = lax_rs(s, c)
    return RSFrame(lax=lax, eig=eigh_pd_pair(lax, lax_rs_inverse(s, c)), u=u_vec(s, c))


def v_vec(s: RSState, c: Coupling) -> OrbitVector:
    """v = L2^(-1/2) u; lies on |v|^2 = n."""
    return rs_frame(s, c).v


def ham_suth(s: SutherlandState, c: Coupling) -> float:
    """1/2 sum p^2 + kappa^2/2 sum_{j != k} 1/sinh^2(q_j - q_k)."""
    check_coupling(s, c)
    diffs = s.q[:, None] - s.q[None, :]
    np.fill_diagonal(diffs, np.inf)
    return float(0.5 * np.sum(s.p**2) + 0.5 * c.kappa**2 * np.sum(1.0 / np.sinh(diffs) ** 2))


def ham_rs(s: RSState, c: Coupling) -> float:
    """1/2 tr(L2 + L2^-1); tr L2 = sum u^2 since C has unit diagonal."""
    u = u_vec(s, c)
    return float(0.5 * (np.sum(u * u) + np.trace(lax_rs_inverse(s, c)).real))


def ham_rs_explicit(s: RSState, c: Coupling) -> float:
    """sum_k cosh(2 q_hat_k) prod_{j != k} (1 + 4 kappa^2/(p_hat_k - p_hat_j)^2)^(1/2)."""
    check_coupling(s, c)
    return float(np.sum(np.cosh(2.0 * s.q_hat) * np.exp(2.0 * _log_weights(s.p_hat, c.kappa))))


def reduced_hamiltonian(lax: ArrayLike, hid: HamiltonianId) -> float:
    """(1/j) tr L1^j for family H, (1/2k) tr L2^k for family H_hat."""
    eig = eigh_desc(lax)
    hid.validate()
    lam = eig.values
    if hid.family is Family.H:
        return float(np.sum(lam ** hid.index) / hid.index)
    if lam[-1] <= 0.0:
        raise NotPositiveDefinite(f"H_hat family needs a positive definite Lax matrix, min eigenvalue {lam[-1]:.3e}")
    return float(np.sum(lam ** hid.index) / (2 * hid.index))


def slice_hamiltonian(s: State, c: Coupling, hid: HamiltonianId) -> float:
    """A reduced Hamiltonian of either family evaluated on the state's own slice."""
    check_coupling(s, c)
    hid.validate()
    if isinstance(s, SutherlandState):
        if hid.family is Family.H_HAT:
            return float(np.sum(np.exp(2 * hid.index * s.q)) / (2 * hid.index))
        if hid.index == 1:
            return float(np.sum(s.p))
        if hid.index == 2:
            return ham_suth(s, c)
        return reduced_hamiltonian(lax_suth(s, c), hid)
    if hid.family is Family.H:
        return float(np.sum(s.p_hat ** hid.index) / hid.index)
    if hid.index == 1:
        u = u_vec(s, c)
        return float(0.5 * np.sum(u * u))
    if hid.index < 0:
        # tr L2^k = tr (L2^-1)^|k|
        lam = eigh_desc(lax_rs_inverse(s, c)).values
        return float(np.sum(lam ** -hid.index) / (2 * hid.index))
    return reduced_hamiltonian(lax_rs(s, c), hid)


def own_lax(s: State, c: Coupling) -> ComplexMatrix:
    """L1 for Sutherland states, L2 for RS states."""
    return lax_suth(s, c) if isinstance(s, SutherlandState) else lax_rs(s, c)


def own_family(s: State) -> Family:
    return Family.H if isinstance(s, SutherlandState) else Family.H_HAT
