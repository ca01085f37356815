"""
Summary:
Exact flows of both commuting Hamiltonian families.
The unreduced flows on T*GL(n,C) are explicit; the reduced flows are
their projections back to a gauge slice. A classic RK4 integrator of
Hamilton's equations on the slice serves as an independent oracle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import pandas as pd

from dualax.config import Config
from dualax.duality import central_gradient
from dualax.errors import CollidingEigenvalues, ValidationError
from dualax.linalg import (
    RealVector,
    eigh_desc,
    exp_herm,
    herm_power,
    pd_power,
)
from dualax.models import (
    Coupling,
    Family,
    HamiltonianId,
    RSState,
    State,
    SutherlandState,
    check_coupling,
    lax_rs,
    lax_rs_inverse,
    lax_suth,
    own_family,
    slice_hamiltonian,
)
from dualax.pool import parallel_map
from dualax.reduction import UnreducedPoint, embed, gauge_fix, gram_power

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowSpec:
    """Which Hamiltonian, for how long, sampled how often."""
    hamiltonian: HamiltonianId
    t: float
    steps: int = 1

    def __post_init__(self) -> None:
        if not math.isfinite(self.t):
            raise ValidationError(f"flow time must be finite, got {self.t!r}")
        if isinstance(self.steps, bool) or int(self.steps) != self.steps or self.steps < 1:
            raise ValidationError(f"steps must be a positive integer, got {self.steps!r}")


def flow_unreduced_H(pt: UnreducedPoint, j: int, t: float) -> UnreducedPoint:
    """g(t) = g exp(t J^(j-1)); J and v constant."""
    HamiltonianId(Family.H, j).validate()
    generator = herm_power(pt.J, j - 1)
    return UnreducedPoint(g=pt.g @ exp_herm(generator, t), J=pt.J, v=pt.v)


def flow_unreduced_Hhat(pt: UnreducedPoint, k: int, t: float) -> UnreducedPoint:
    """J(t) = J - t (g^dagger g)^k; g and v constant."""
    HamiltonianId(Family.H_HAT, k).validate()
    shift = gram_power(pt.g, k, outer=False)
    return UnreducedPoint(g=pt.g, J=pt.J - t * shift, v=pt.v)


def flow_unreduced(pt: UnreducedPoint, hid: HamiltonianId, t: float) -> UnreducedPoint:
    if hid.family is Family.H:
        return flow_unreduced_H(pt, hid.index, t)
    return flow_unreduced_Hhat(pt, hid.index, t)


def flow(s: State, c: Coupling, hid: HamiltonianId, t: float) -> State:
    """Embed on the state's own slice, flow upstairs, gauge-fix back to the same slice."""
    check_coupling(s, c)
    hid.validate()
    moved = flow_unreduced(embed(s, c), hid, t)
    return gauge_fix(moved, c, s.MODEL).state


def flow_suth(s: SutherlandState, c: Coupling, j: int, t: float) -> SutherlandState:
    """Flow of H_j^red on S1."""
    return flow(s, c, HamiltonianId(Family.H, j), t)


def flow_rs(s: RSState, c: Coupling, k: int, t: float) -> RSState:
    """Flow of H_hat_k^red on S2."""
    return flow(s, c, HamiltonianId(Family.H_HAT, k), t)


def suth_positions_closed_form(s: SutherlandState, c: Coupling, j: int, t: float) -> RealVector:
    """q(t) from e^{2q(t)} = D[e^q exp(2t L1^(j-1)) e^q]."""
    eq = np.exp(s.q)
    inner = exp_herm(herm_power(lax_suth(s, c), j - 1), 2.0 * t)
    return 0.5 * np.log(eigh_desc(eq[:, None] * inner * eq[None, :]).values)


def rs_positions_closed_form(s: RSState, c: Coupling, k: int, t: float) -> RealVector:
    """p_hat(t) = D[diag(p_hat) - t L2^k]."""
    power = pd_power(lax_rs(s, c), k) if k > 0 else pd_power(lax_rs_inverse(s, c), -k)
    return eigh_desc(np.diag(s.p_hat) - t * power).values


def _stacked_energy(s: State, c: Coupling, hid: HamiltonianId) -> Optional[Callable[[np.ndarray], RealVector]]:
    """Row-wise closed forms of ham_suth and H_hat_1 = 1/2 sum u^2; None for every other Hamiltonian."""
    n = s.n
    kappa = c.kappa
    off = ~np.eye(n, dtype=bool)
    if isinstance(s, SutherlandState) and hid == HamiltonianId(Family.H, 2):

        def energy(rows: np.ndarray) -> RealVector:
            q, p = rows[:, :n], rows[:, n:]
            diffs = (q[:, :, None] - q[:, None, :])[:, off]
            return 0.5 * np.sum(p**2, axis=1) + 0.5 * kappa**2 * np.sum(1.0 / np.sinh(diffs) ** 2, axis=1)

        return energy
    if isinstance(s, RSState) and hid == HamiltonianId(Family.H_HAT, 1):

        def energy(rows: np.ndarray) -> RealVector:
            p_hat, q_hat = rows[:, :n], rows[:, n:]
            d2 = np.full((rows.shape[0], n, n), np.inf)
            d2[:, off] = (p_hat[:, :, None] - p_hat[:, None, :])[:, off] ** 2
            log_w = 0.25 * np.sum(np.log1p(4.0 * kappa**2 / d2), axis=2)
            return 0.5 * np.sum(np.exp(2.0 * (log_w - q_hat)), axis=1)

        return energy
    return None


def hamilton_field(s: State, c: Coupling, hid: HamiltonianId, h: float) -> Callable[[RealVector], RealVector]:
    """Vector field (dH/dy, -dH/dx) in the slice's Darboux coordinates, gradient by central differences."""
    cls = type(s)
    n = s.n
    stacked = _stacked_energy(s, c, hid)
    shift = h * np.eye(2 * n)

    def energy(xy: RealVector) -> float:
        return slice_hamiltonian(cls.from_coords(xy), c, hid)

    def gradient(xy: RealVector) -> RealVector:
        if stacked is None:
            return central_gradient(energy, xy, h)
        # whole stencil in one call; divisor is the realized step
        xp = xy[None, :] + shift
        xm = xy[None, :] - shift
        return (stacked(xp) - stacked(xm)) / np.diagonal(xp - xm)

    def field_at(xy: RealVector) -> RealVector:
        grad = gradient(xy)
        return np.concatenate([grad[n:], -grad[:n]])

    return field_at


def rk4_oracle(
    s: State, c: Coupling, hid: HamiltonianId, t: float, steps: int = Config.ORACLE_STEPS, h: float = Config.GRADIENT_STEP,
) -> State:
    """Classic fourth-order Runge-Kutta integration of Hamilton's equations on the slice."""
    check_coupling(s, c)
    hid.validate()
    FlowSpec(hid, t, steps)
    rhs = hamilton_field(s, c, hid, h)
    dt = t / steps
    xy = s.coords
    for _ in range(steps):
        k1 = rhs(xy)
        k2 = rhs(xy + 0.5 * dt * k1)
        k3 = rhs(xy + 0.5 * dt * k2)
        k4 = rhs(xy + dt * k3)
        xy = xy + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return type(s).from_coords(xy)


def conserved_values(s: State, c: Coupling) -> RealVector:
    """The state's own family H_1..H_n (Sutherland) or H_hat_1..H_hat_n (RS)."""
    family = own_family(s)
    return np.array([slice_hamiltonian(s, c, HamiltonianId(family, i)) for i in range(1, s.n + 1)])


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled exact flow; samples hitting a chamber wall are listed in `skipped`."""
    times: RealVector
    states: list
    conserved: np.ndarray
    skipped: list[float] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        if not self.states:
            raise ValidationError("trajectory has no samples")
        n = self.states[0].n
        if isinstance(self.states[0], SutherlandState):
            names = ("q", "p", "H")
        else:
            names = ("p_hat", "q_hat", "Hhat")
        cols = [f"{names[0]}{i}" for i in range(1, n + 1)]
        cols += [f"{names[1]}{i}" for i in range(1, n + 1)]
        cols += [f"{names[2]}{i}" for i in range(1, n + 1)]
        data = np.column_stack([np.array([s.coords for s in self.states]), self.conserved])
        frame = pd.DataFrame(data, columns=cols)
        frame.insert(0, "t", self.times)
        return frame


def sample_trajectory(s: State, c: Coupling, spec: FlowSpec, jobs: int = 1) -> Trajectory:
    """Exact flow evaluated at i * t / steps, i = 0..steps, with conserved-quantity columns."""
    check_coupling(s, c)
    spec.hamiltonian.validate()
    times = np.array([i * spec.t / spec.steps for i in range(spec.steps + 1)])

    def sample(t: float) -> State | None:
        try:
            return flow(s, c, spec.hamiltonian, t)
        except CollidingEigenvalues as e:
            logger.warning("[flow] skipping t=%.17g: %s", t, e)
            return None

    results = parallel_map(sample, list(times), jobs)
    kept = [(t, st) for t, st in zip(times, results) if st is not None]
    skipped = [float(t) for t, st in zip(times, results) if st is None]
    states = [st for _, st in kept]
    conserved = np.array([conserved_values(st, c) for st in states]).reshape(len(states), s.n)
    return Trajectory(
        times=np.array([t for t, _ in kept]),
        states=states,
        conserved=conserved,
        skipped=skipped,
    )
