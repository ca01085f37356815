"""
Summary:
Extended phase space T*GL(n,C) x O, the K = U(n) x U(n) action, the
moment map, the embeddings of both gauge slices and the constructive
gauge-fixing algorithms that bring a constrained point to S1 or S2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Generic, TypeVar

import numpy as np
from numpy.typing import ArrayLike

from dualax import config
from dualax.errors import ConstraintViolated, PhaseDegeneracy, SingularMatrix, ValidationError
from dualax.linalg import (
    ComplexMatrix,
    antihermitian_part,
    as_matrix,
    dagger,
    eigh_desc,
    hermitian_part,
    norm_inf,
    pd_power,
    polar_left,
    polar_right,
    require_simple,
    unitarity_defect,
)
from dualax.models import (
    Coupling,
    Family,
    HamiltonianId,
    OrbitVector,
    RSState,
    SutherlandState,
    check_coupling,
    lax_rs,
    lax_suth,
    q_hat_from_u,
    rs_frame,
    xi_unchecked,
)

logger = logging.getLogger(__name__)

S = TypeVar("S", SutherlandState, RSState)


@dataclass(frozen=True, eq=False)
class UnreducedPoint:
    """
    Summary:
    (g, J, v): g in GL(n,C), J = J^R in gl(n,C) (left trivialization) and
    the orbit coordinate v with xi = i kappa (v v^dagger - 1).
    """
    g: ComplexMatrix
    J: ComplexMatrix
    v: OrbitVector

    def __post_init__(self) -> None:
        g = as_matrix(self.g, "g")
        J = as_matrix(self.J, "J")
        v = np.asarray(self.v, dtype=np.complex128)
        if J.shape != g.shape or v.shape != (g.shape[0],):
            raise ValidationError(f"inconsistent shapes g{g.shape}, J{J.shape}, v{v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("v has non-finite entries")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.g.shape[0]


def point_distance(a: UnreducedPoint, b: UnreducedPoint) -> float:
    """Largest of the g, J and v distances (inf-norms)."""
    return max(norm_inf(a.g - b.g), norm_inf(a.J - b.J), norm_inf(a.v - b.v))


@dataclass(frozen=True, eq=False)
class KElement:
    """(eta_L, eta_R) in U(n) x U(n)."""
    eta_L: ComplexMatrix
    eta_R: ComplexMatrix

    def __post_init__(self) -> None:
        tol = config.active().unitarity
        for name in ("eta_L", "eta_R"):
            u = as_matrix(getattr(self, name), name)
            defect = unitarity_defect(u)
            if defect > tol * u.shape[0]:
                raise ValidationError(f"{name} is not unitary: ||U^dagger U - 1||_inf = {defect:.3e}")
            object.__setattr__(self, name, u)

    @classmethod
    def identity(cls, n: int) -> "KElement":
        eye = np.eye(n, dtype=np.complex128)
        return cls(eye, eye)

    @classmethod
    def torus(cls, phases: ArrayLike) -> "KElement":
        """Diagonal torus element embedded diagonally: eta_L = eta_R = diag(phases)."""
        tau = np.diag(np.asarray(phases, dtype=np.complex128))
        return cls(tau, tau)

    def __matmul__(self, inner: "KElement") -> "KElement":
        # (self @ inner) acts as inner first, then self
        return KElement(self.eta_L @ inner.eta_L, self.eta_R @ inner.eta_R)

    def inverse(self) -> "KElement":
        return KElement(dagger(self.eta_L), dagger(self.eta_R))


def act(k: KElement, pt: UnreducedPoint) -> UnreducedPoint:
    """(eta_L g eta_R^-1, eta_R J eta_R^-1, eta_L v)."""
    return UnreducedPoint(
        g=k.eta_L @ pt.g @ dagger(k.eta_R),
        J=k.eta_R @ pt.J @ dagger(k.eta_R),
        v=k.eta_L @ pt.v,
    )


def moment_residual(pt: UnreducedPoint, c: Coupling) -> float:
    """||(g J g^-1)_+ + xi(v)||_inf + ||J_+||_inf; zero on the constraint surface."""
    if pt.n != c.n:
        raise ValidationError(f"point has n={pt.n} but coupling has n={c.n}")
    gJ = pt.g @ pt.J
    conj = np.linalg.solve(pt.g.T, gJ.T).T
    left = antihermitian_part(conj) + xi_unchecked(pt.v, c.kappa)
    return norm_inf(left) + norm_inf(antihermitian_part(pt.J))


def condition_number(g: ComplexMatrix) -> float:
    """2-norm condition number sigma_max / sigma_min."""
    sigma = np.linalg.svd(g, compute_uv=False)
    return float(sigma[0] / sigma[-1]) if sigma[-1] > 0.0 else float("inf")


def moment_scale(pt: UnreducedPoint, c: Coupling) -> float:
    """Size of the terms entering the moment map; g J g^-1 is only as accurate as cond(g) ||J||."""
    return 1.0 + abs(c.kappa) * pt.n + condition_number(pt.g) * norm_inf(pt.J)


def embed_s1(s: SutherlandState, c: Coupling) -> UnreducedPoint:
    """(e^q, L1(q, p), w)."""
    check_coupling(s, c)
    return UnreducedPoint(
        g=np.diag(np.exp(s.q)).astype(np.complex128),
        J=lax_suth(s, c),
        v=np.ones(s.n, dtype=np.complex128),
    )


def embed_s2(s: RSState, c: Coupling) -> UnreducedPoint:
    """(L2^(1/2), diag(p_hat), L2^(-1/2) u)."""
    frame = rs_frame(s, c)
    return UnreducedPoint(g=frame.sqrt, J=np.diag(s.p_hat).astype(np.complex128), v=frame.v)


def embed(s: SutherlandState | RSState, c: Coupling) -> UnreducedPoint:
    return embed_s1(s, c) if isinstance(s, SutherlandState) else embed_s2(s, c)


@dataclass(frozen=True, eq=False)
class GaugeFixResult(Generic[S]):
    """Slice state, the K element reaching it, and the residual diagnostics."""
    state: S
    transform: KElement
    constraint_residual: float
    slice_residual: float
    extra: dict[str, float] = field(default_factory=dict)

    @property
    def diagnostics(self) -> dict[str, float]:
        return {"constraint": self.constraint_residual, "slice_form": self.slice_residual, **self.extra}


def _require_constraint(pt: UnreducedPoint, c: Coupling) -> float:
    residual = moment_residual(pt, c)
    limit = config.active().constraint_input * pt.n * moment_scale(pt, c)
    if residual > limit:
        raise ConstraintViolated(f"point is off the constraint surface: moment residual {residual:.3e} > {limit:.3e}")
    return residual


def _unit_phases(z: np.ndarray, what: str, require_unit: bool) -> np.ndarray:
    mod = np.abs(z)
    tol = config.active().phase_modulus
    if require_unit:
        worst = int(np.argmax(np.abs(mod - 1.0)))
        if abs(mod[worst] - 1.0) > tol:
            raise PhaseDegeneracy(f"|{what}_{worst + 1}| = {mod[worst]:.12g}, expected 1")
    else:
        worst = int(np.argmin(mod))
        if mod[worst] < tol:
            raise PhaseDegeneracy(f"|{what}_{worst + 1}| = {mod[worst]:.3e} cannot be phase-fixed")
    return z.conj() / mod


def gauge_fix_s1(pt: UnreducedPoint, c: Coupling) -> GaugeFixResult[SutherlandState]:
    """Bring a constrained point to the Sutherland slice S1."""
    residual = _require_constraint(pt, c)
    g_minus, g_plus = polar_right(pt.g)
    eig = eigh_desc(g_minus)
    q = np.log(eig.values)
    require_simple(q, norm_inf(q), "log-spectrum of g_-")
    V = eig.basis
    diagonalize = KElement(dagger(V), dagger(V) @ g_plus)
    mid = act(diagonalize, pt)
    torus = KElement.torus(_unit_phases(mid.v, "v", require_unit=True))
    fixed = act(torus, mid)
    J = hermitian_part(fixed.J)
    state = SutherlandState(q=q, p=np.diag(J).real)
    slice_residual = norm_inf(J - lax_suth(state, c))
    logger.debug("[gauge_fix_s1] n=%d constraint=%.3e slice_form=%.3e", pt.n, residual, slice_residual)
    return GaugeFixResult(state, torus @ diagonalize, residual, slice_residual)


def gauge_fix_s2(pt: UnreducedPoint, c: Coupling) -> GaugeFixResult[RSState]:
    """Bring a constrained point to the Ruijsenaars slice S2."""
    residual = _require_constraint(pt, c)
    eig = eigh_desc(hermitian_part(pt.J))
    p_hat = eig.values
    require_simple(p_hat, norm_inf(p_hat), "spectrum of J")
    W = eig.basis
    eye = np.eye(pt.n, dtype=np.complex128)
    rotate = KElement(eye, dagger(W))
    h_plus, h_minus = polar_left(pt.g @ W)
    straighten = KElement(dagger(h_plus), eye)
    partial = straighten @ rotate
    u = h_minus @ (dagger(h_plus) @ pt.v)
    tau = _unit_phases(u, "u", require_unit=False)
    torus = KElement.torus(tau)
    u_pos = np.abs(u)
    state = RSState(p_hat=p_hat, q_hat=q_hat_from_u(p_hat, u_pos, c.kappa))
    g_final = (tau[:, None] * h_minus) * tau.conj()[None, :]
    g_final = hermitian_part(g_final)
    slice_residual = norm_inf(g_final @ g_final - lax_rs(state, c))
    logger.debug("[gauge_fix_s2] n=%d constraint=%.3e slice_form=%.3e", pt.n, residual, slice_residual)
    return GaugeFixResult(state, torus @ partial, residual, slice_residual)


def gauge_fix(pt: UnreducedPoint, c: Coupling, model: str) -> GaugeFixResult:
    if model == SutherlandState.MODEL:
        return gauge_fix_s1(pt, c)
    if model == RSState.MODEL:
        return gauge_fix_s2(pt, c)
    raise ValidationError(f"unknown model {model!r}")


def gram_power(g: ComplexMatrix, k: int, outer: bool = True) -> ComplexMatrix:
    """(g g^dagger)^k, or (g^dagger g)^k with outer=False; negative k goes through g^-1."""
    if k < 0:
        try:
            g = np.linalg.solve(g, np.eye(g.shape[0], dtype=np.complex128))
        except np.linalg.LinAlgError as e:
            raise SingularMatrix(f"g is singular: {e}") from e
        outer = not outer
    gram = g @ dagger(g) if outer else dagger(g) @ g
    return pd_power(hermitian_part(gram), abs(k))


def unreduced_hamiltonian(pt: UnreducedPoint, hid: HamiltonianId) -> float:
    """H_j = (1/j) Re tr J^j, H_hat_k = (1/2k) tr (g g^dagger)^k."""
    hid.validate()
    k = hid.index
    if hid.family is Family.H:
        return float(np.trace(np.linalg.matrix_power(pt.J, k)).real / k)
    return float(np.trace(gram_power(pt.g, k)).real / (2 * k))


def invariant_F(pt: UnreducedPoint, a: int) -> float:
    """F^a = (1/a) tr (J_-)^a."""
    return float(np.trace(np.linalg.matrix_power(hermitian_part(pt.J), a)).real / a)


def invariant_E(pt: UnreducedPoint, a: int) -> float:
    """E^a = (1/a) tr (g g^dagger)^a."""
    return float(np.trace(np.linalg.matrix_power(pt.g @ dagger(pt.g), a)).real / a)
