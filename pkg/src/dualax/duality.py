"""
Summary:
The duality symplectomorphism between the Sutherland slice S1 and the
Ruijsenaars slice S2, realized as embedding followed by gauge fixing
onto the other slice, plus a finite-difference canonicity certificate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Generic, TypeVar

import numpy as np

from dualax.errors import ValidationError
from dualax.linalg import ComplexMatrix, RealVector, eigh_desc, norm_inf
from dualax.models import Coupling, RSState, State, SutherlandState, lax_suth, rs_frame
from dualax.pool import parallel_map
from dualax.reduction import (
    GaugeFixResult,
    KElement,
    UnreducedPoint,
    act,
    embed_s1,
    embed_s2,
    gauge_fix_s1,
    gauge_fix_s2,
    moment_residual,
    point_distance,
)

logger = logging.getLogger(__name__)

T = TypeVar("T", SutherlandState, RSState)


@dataclass(frozen=True, eq=False)
class DualityResult(Generic[T]):
    """Mapped state, the K element relating the two slice points, and residuals."""
    state: T
    transform: KElement
    residuals: dict[str, float] = field(default_factory=dict)


def _coord_distance(a: State, b: State) -> float:
    return norm_inf(a.coords - b.coords)


def _single_dual(s: State) -> State:
    """n = 1: (q, p) <-> (p_hat, q_hat) = (p, -q); both slice points are (e^q, p, 1)."""
    if isinstance(s, SutherlandState):
        return RSState(p_hat=s.p, q_hat=-s.q)
    return SutherlandState(q=-s.q_hat, p=s.p_hat)


def _single_fix(pt: UnreducedPoint, s: State, c: Coupling) -> GaugeFixResult:
    return GaugeFixResult(_single_dual(s), KElement.identity(1), moment_residual(pt, c), 0.0)


def suth_to_rs(s: SutherlandState, c: Coupling, preview: bool = True) -> DualityResult[RSState]:
    """(q, p) -> (p_hat, q_hat) via gauge_fix_s2(embed_s1(s))."""
    pt = embed_s1(s, c)
    fix = _single_fix(pt, s, c) if s.n == 1 else gauge_fix_s2(pt, c)
    residuals = dict(fix.diagnostics)
    residuals["transform"] = point_distance(act(fix.transform, pt), embed_s2(fix.state, c))
    if preview:
        back = _single_dual(fix.state) if s.n == 1 else gauge_fix_s1(embed_s2(fix.state, c), c).state
        residuals["roundtrip"] = _coord_distance(back, s)
    logger.debug("[duality] s1->s2 n=%d residuals=%s", s.n, residuals)
    return DualityResult(fix.state, fix.transform, residuals)


def rs_to_suth(s: RSState, c: Coupling, preview: bool = True) -> DualityResult[SutherlandState]:
    """(p_hat, q_hat) -> (q, p) via gauge_fix_s1(embed_s2(s))."""
    pt = embed_s2(s, c)
    fix = _single_fix(pt, s, c) if s.n == 1 else gauge_fix_s1(pt, c)
    residuals = dict(fix.diagnostics)
    residuals["transform"] = point_distance(act(fix.transform, pt), embed_s1(fix.state, c))
    if preview:
        back = _single_dual(fix.state) if s.n == 1 else gauge_fix_s2(embed_s1(fix.state, c), c).state
        residuals["roundtrip"] = _coord_distance(back, s)
    logger.debug("[duality] s2->s1 n=%d residuals=%s", s.n, residuals)
    return DualityResult(fix.state, fix.transform, residuals)


def map_state(s: State, c: Coupling, preview: bool = True) -> DualityResult:
    """Map a state of either model to its dual."""
    if isinstance(s, SutherlandState):
        return suth_to_rs(s, c, preview)
    if isinstance(s, RSState):
        return rs_to_suth(s, c, preview)
    raise ValidationError(f"unsupported state type {type(s).__name__}")


def dual_actions(s: State, c: Coupling) -> RealVector:
    """Action variables: p_hat for a Sutherland state, q = 1/2 log eig(L2) for an RS state."""
    if isinstance(s, SutherlandState):
        return eigh_desc(lax_suth(s, c)).values
    return 0.5 * np.log(rs_frame(s, c).eig.values)


def darboux_form(n: int) -> np.ndarray:
    """[[0, -I], [I, 0]]: sum dy ^ dx in coordinate order (x, y)."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def central_gradient(fn: Callable[[RealVector], float], x: RealVector, h: float) -> RealVector:
    """Central-difference gradient of a scalar function; the divisor is the realized step."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.empty_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (fn(xp) - fn(xm)) / (xp[i] - xm[i])
    return grad


def jacobian_fd(
    fn: Callable[[RealVector], RealVector],
    x: RealVector,
    h: float,
    jobs: int = 1,
) -> np.ndarray:
    """Central-difference Jacobian; the divisor is the realized step xp - xm."""
    x = np.asarray(x, dtype=np.float64)

    def column(i: int) -> RealVector:
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        return (fn(xp) - fn(xm)) / (xp[i] - xm[i])

    return np.column_stack(parallel_map(column, range(x.size), jobs))


def symplectic_certificate(s: SutherlandState, c: Coupling, h: float, jobs: int = 1) -> float:
    """||M^T A M - A||_inf for the Jacobian M of (q, p) -> (p_hat, q_hat)."""

    def forward(xy: RealVector) -> RealVector:
        return suth_to_rs(SutherlandState.from_coords(xy), c, preview=False).state.coords

    M = jacobian_fd(forward, s.coords, h, jobs)
    A = darboux_form(s.n)
    return norm_inf(M.T @ A @ M - A)


def eta_of(result: DualityResult) -> ComplexMatrix:
    """Single unitary relating the slice points; for the diagonal action eta_L = eta_R."""
    return result.transform.eta_L
