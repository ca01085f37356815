"""
Summary:
Numerical verification of the identities the duality construction rests on:
- commutation relations of both Lax matrices
- the Cauchy determinant identity for L2
- the Poisson table of the invariants on the RS slice
- Hamiltonian identities and pullbacks of unreduced Hamiltonians
plus batch orchestration over random chamber states (run_all), which also
aggregates the duality-map and dynamics invariants into one VerifyReport.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from tqdm import tqdm

from dualax import config
from dualax.config import Config, Tolerances
from dualax.duality import DualityResult, central_gradient, eta_of, rs_to_suth, suth_to_rs, symplectic_certificate
from dualax.dynamics import (
    conserved_values,
    flow_rs,
    flow_suth,
    flow_unreduced_H,
    flow_unreduced_Hhat,
    rk4_oracle,
)
from dualax.errors import ConfigError, DualaxError, IndexOutOfRange, ValidationError
from dualax.linalg import RealVector, dagger, eigh_desc, logdet_pd, norm_inf
from dualax.models import (
    Coupling,
    Family,
    HamiltonianId,
    RSState,
    SutherlandState,
    cauchy_factor,
    cauchy_inverse,
    check_coupling,
    ham_rs,
    ham_rs_explicit,
    ham_suth,
    lax_rs,
    lax_suth,
    slice_hamiltonian,
    u_vec,
)
from dualax.pool import parallel_map
from dualax.reduction import (
    condition_number,
    embed,
    embed_s1,
    embed_s2,
    invariant_E,
    invariant_F,
    moment_residual,
    moment_scale,
    unreduced_hamiltonian,
)
from dualax.sampling import random_rs, random_sutherland

logger = logging.getLogger(__name__)


def _rel(value: float | RealVector, reference: float | RealVector) -> float:
    """max |value - reference| / (1 + max |reference|)."""
    value = np.asarray(value, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    return float(np.max(np.abs(value - reference)) / (1.0 + np.max(np.abs(reference))))


def _rel_each(value: RealVector, reference: RealVector) -> float:
    """Componentwise max |value_i - reference_i| / (1 + |reference_i|)."""
    value = np.asarray(value, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    return float(np.max(np.abs(value - reference) / (1.0 + np.abs(reference))))


# =========================================================================
# Closed-form identities
# =========================================================================

def check_commutation_s1(s: SutherlandState, c: Coupling) -> float:
    """||[e^{2q}, L1] + 2i kappa ((e^q w)(e^q w)^dagger - e^{2q})||_inf."""
    lax = lax_suth(s, c)
    eq = np.exp(s.q)
    E = np.diag(eq * eq)
    x = eq.astype(np.complex128)
    lhs = E @ lax - lax @ E + 2j * c.kappa * (np.outer(x, x.conj()) - E)
    return norm_inf(lhs)


def commutation_scale_s1(s: SutherlandState, c: Coupling) -> float:
    return 1.0 + float(np.exp(2.0 * s.q[0])) * norm_inf(lax_suth(s, c))


def check_commutation_s2(s: RSState, c: Coupling) -> float:
    """||[L2, p_hat] + 2i kappa (u u^dagger - L2)||_inf."""
    lax = lax_rs(s, c)
    u = u_vec(s, c).astype(np.complex128)
    P = np.diag(s.p_hat)
    lhs = lax @ P - P @ lax + 2j * c.kappa * (np.outer(u, u.conj()) - lax)
    return norm_inf(lhs)


def commutation_scale_s2(s: RSState, c: Coupling) -> float:
    return 1.0 + norm_inf(lax_rs(s, c)) * (abs(c.kappa) + float(np.max(np.abs(s.p_hat))))


def cauchy_condition(s: RSState, c: Coupling) -> float:
    """||C||_inf ||C^-1||_inf of the unit-diagonal factor of L2 = diag(u) C diag(u)."""
    return norm_inf(cauchy_factor(s.p_hat, c.kappa)) * norm_inf(cauchy_inverse(s.p_hat, c.kappa))


def check_det_identity(s: RSState, c: Coupling) -> float:
    """
    Relative error of det L2 against the Cauchy product
    prod u_m^2 * prod_{j<k} d^2 / (d^2 + 4 kappa^2), and against exp(-2 sum q_hat),
    compared in log space and divided by the conditioning of the Cauchy factor.
    """
    log_value = logdet_pd(lax_rs(s, c))
    u = u_vec(s, c)
    iu = np.triu_indices(s.n, 1)
    d2 = (s.p_hat[:, None] - s.p_hat[None, :])[iu] ** 2
    log_cauchy = 2.0 * float(np.sum(np.log(u))) - float(np.sum(np.log1p(4.0 * c.kappa**2 / d2)))
    log_target = -2.0 * float(np.sum(s.q_hat))
    rel = max(abs(math.expm1(log_value - log_cauchy)), abs(math.expm1(log_value - log_target)))
    return rel / cauchy_condition(s, c)


def check_hamiltonian_identities(s1: SutherlandState, s2: RSState, c: Coupling) -> float:
    """ham_suth against 1/2 tr L1^2, ham_rs against its cosh form."""
    lax = lax_suth(s1, c)
    trace_form = 0.5 * float(np.trace(lax @ lax).real)
    return max(_rel(ham_suth(s1, c), trace_form), _rel(ham_rs(s2, c), ham_rs_explicit(s2, c)))


def _all_ids(n: int) -> list[HamiltonianId]:
    ids = HamiltonianId.family_ids(Family.H, n) + HamiltonianId.family_ids(Family.H_HAT, n)
    return ids + [HamiltonianId(Family.H_HAT, -k) for k in range(1, n + 1)]


def check_pullback(s1: SutherlandState, s2: RSState, c: Coupling) -> float:
    """
    Unreduced Hamiltonians and invariants restricted to the slices against their reduced forms.
    Negative powers of g g^dagger are divided by |k| cond(g)^2.
    """
    worst = 0.0
    for s in (s1, s2):
        pt = embed(s, c)
        gram_cond = condition_number(pt.g) ** 2
        for hid in _all_ids(s.n):
            rel = _rel(unreduced_hamiltonian(pt, hid), slice_hamiltonian(s, c, hid))
            if hid.index < 0:
                rel /= -hid.index * gram_cond
            worst = max(worst, rel)
    pt = embed_s2(s2, c)
    lam = eigh_desc(lax_rs(s2, c)).values
    for a in range(1, s2.n + 1):
        worst = max(worst, _rel(invariant_F(pt, a), np.sum(s2.p_hat**a) / a))
        worst = max(worst, _rel(invariant_E(pt, a), np.sum(lam**a) / a))
    return worst


def check_eta_relation(s: SutherlandState, c: Coupling, result: Optional[DualityResult] = None) -> float:
    """(eta e^q eta^-1, eta L1 eta^-1, eta w) against (L2^(1/2), p_hat, v), plus ||eta_L - eta_R||."""
    if result is None:
        result = suth_to_rs(s, c, preview=False)
    eta = eta_of(result)
    src = embed_s1(s, c)
    dst = embed_s2(result.state, c)
    parts = (
        (eta @ src.g @ dagger(eta), dst.g),
        (eta @ src.J @ dagger(eta), dst.J),
        (eta @ src.v, dst.v),
    )
    worst = norm_inf(result.transform.eta_L - result.transform.eta_R)
    for got, want in parts:
        worst = max(worst, norm_inf(got - want) / (1.0 + norm_inf(want)))
    return worst


def check_spectrum_exchange(s: SutherlandState, c: Coupling, dual: Optional[RSState] = None) -> float:
    """eig L1(q, p) = p_hat and eig L2(p_hat, q_hat) = e^{2q}."""
    if dual is None:
        dual = suth_to_rs(s, c, preview=False).state
    return max(
        _rel(eigh_desc(lax_suth(s, c)).values, dual.p_hat),
        _rel(eigh_desc(lax_rs(dual, c)).values, np.exp(2.0 * s.q)),
    )


# =========================================================================
# Poisson brackets on the RS slice
# =========================================================================

@dataclass(frozen=True)
class Observable:
    """F^a = (1/a) tr p_hat^a or E^a = (1/a) tr L2^a, as functions of (p_hat, q_hat)."""
    kind: Literal["E", "F"]
    a: int

    @classmethod
    def parse(cls, text: str) -> "Observable":
        text = text.strip()
        kind, digits = text[:1].upper(), text[1:]
        if kind not in ("E", "F") or not digits.isdigit():
            raise ValidationError(f"observable must look like E<a> or F<a>, got {text!r}")
        return cls(kind, int(digits))

    def validate(self, n: int) -> None:
        if not 1 <= self.a <= n:
            raise IndexOutOfRange(f"observable index {self.a} out of range 1..{n}")

    @property
    def label(self) -> str:
        return f"{self.kind}{self.a}"

    def value(self, s: RSState, c: Coupling) -> float:
        if self.kind == "F":
            return float(np.sum(s.p_hat**self.a) / self.a)
        return float(np.sum(eigh_desc(lax_rs(s, c)).values ** self.a) / self.a)

    def gradient(self, s: RSState, c: Coupling, h: float) -> RealVector:
        self.validate(s.n)
        return central_gradient(lambda xy: self.value(RSState.from_coords(xy), c), s.coords, h)


def _bracket(grad_f: RealVector, grad_g: RealVector) -> float:
    # sum_k (df/dp_hat_k dg/dq_hat_k - df/dq_hat_k dg/dp_hat_k)
    n = grad_f.size // 2
    return float(np.sum(grad_f[:n] * grad_g[n:] - grad_f[n:] * grad_g[:n]))


def poisson_fd(f: Observable | str, g: Observable | str, s: RSState, c: Coupling, h: Optional[float] = None) -> float:
    """Central-difference Poisson bracket {f, g} in the Darboux coordinates (p_hat, q_hat)."""
    check_coupling(s, c)
    f = Observable.parse(f) if isinstance(f, str) else f
    g = Observable.parse(g) if isinstance(g, str) else g
    h = Config.FD_STEP if h is None else h
    return _bracket(f.gradient(s, c, h), g.gradient(s, c, h))


def poisson_exact(f: Observable, g: Observable, s: RSState, c: Coupling) -> float:
    """{E^a, F^b} = 2 tr(p_hat^(b-1) L2^a) = -{F^b, E^a}; brackets within one family vanish."""
    if f.kind == g.kind:
        return 0.0
    sign = 1.0 if f.kind == "E" else -1.0
    e, fo = (f, g) if f.kind == "E" else (g, f)
    power = np.linalg.matrix_power(lax_rs(s, c), e.a)
    return sign * 2.0 * float(np.sum(s.p_hat ** (fo.a - 1) * np.diag(power).real))


def check_poisson_table(s: RSState, c: Coupling, h: Optional[float] = None) -> float:
    """
    Max deviation of the finite-difference brackets of E^a, F^b (a, b <= min(n, 3))
    from the closed-form table. Mixed brackets are measured relative to
    2 sum |lambda|^a max(1, |p_hat|)^(b-1); vanishing ones relative to |grad f| |grad g|.
    """
    check_coupling(s, c)
    h = Config.FD_STEP if h is None else h
    m = min(s.n, Config.POISSON_MAX_INDEX)
    grads = {
        obs: obs.gradient(s, c, h)
        for obs in [Observable(kind, a) for kind in ("E", "F") for a in range(1, m + 1)]
    }
    lam = eigh_desc(lax_rs(s, c)).values
    p_max = max(1.0, float(np.max(np.abs(s.p_hat))))
    worst = 0.0
    for a in range(1, m + 1):
        for b in range(1, m + 1):
            E, F = Observable("E", a), Observable("F", b)
            bound = 2.0 * float(np.sum(np.abs(lam) ** a)) * p_max ** (b - 1)
            mixed = _bracket(grads[E], grads[F])
            worst = max(worst, abs(mixed - poisson_exact(E, F, s, c)) / (1.0 + bound))
            for kind in ("E", "F"):
                x, y = Observable(kind, a), Observable(kind, b)
                scale = 1.0 + float(np.linalg.norm(grads[x]) * np.linalg.norm(grads[y]))
                worst = max(worst, abs(_bracket(grads[x], grads[y])) / scale)
    return worst


def check_poisson_antisymmetry(s: RSState, c: Coupling, h: Optional[float] = None) -> float:
    """max |{f, g} + {g, f}| over the observables of the table."""
    h = Config.FD_STEP if h is None else h
    m = min(s.n, Config.POISSON_MAX_INDEX)
    obs = [Observable(kind, a) for kind in ("E", "F") for a in range(1, m + 1)]
    grads = {o: o.gradient(s, c, h) for o in obs}
    return max(abs(_bracket(grads[f], grads[g]) + _bracket(grads[g], grads[f])) for f in obs for g in obs)


# =========================================================================
# Duality-map and dynamics invariants
# =========================================================================

def suth_horizon(s: SutherlandState, c: Coupling, j: int, reach: float = 0.5) -> float:
    """Flow time after which the positions of an H_j flow have moved by about `reach`."""
    rho = float(np.max(np.abs(eigh_desc(lax_suth(s, c)).values)))
    return min(1.0, reach / (1.0 + rho) ** (j - 1))


def rs_horizon(s: RSState, c: Coupling, k: int, reach: float = 0.5) -> float:
    """Flow time after which the positions of an H_hat_k flow have moved by about `reach`."""
    lam = eigh_desc(lax_rs(s, c)).values
    return min(1.0, reach / float(np.max(lam**k)))


RS_FLOW_INDICES = (1, -1)


def check_flow_constraint(s1: SutherlandState, s2: RSState, c: Coupling) -> float:
    """Scaled moment residual after both unreduced flows, started on the slices."""
    worst = 0.0
    pt = embed_s1(s1, c)
    for j in range(1, min(s1.n, 3) + 1):
        out = flow_unreduced_H(pt, j, suth_horizon(s1, c, j))
        worst = max(worst, moment_residual(out, c) / moment_scale(out, c))
    pt = embed_s2(s2, c)
    for k in RS_FLOW_INDICES:
        out = flow_unreduced_Hhat(pt, k, rs_horizon(s2, c, k))
        worst = max(worst, moment_residual(out, c) / moment_scale(out, c))
    return worst


def check_flow_invariants(s1: SutherlandState, s2: RSState, c: Coupling) -> float:
    """Drift of the state's own commuting family along flow_suth (j = 2) and flow_rs (k = 1)."""
    j = min(2, s1.n)
    moved = flow_suth(s1, c, j, suth_horizon(s1, c, j))
    worst = _rel_each(conserved_values(moved, c), conserved_values(s1, c))
    moved = flow_rs(s2, c, 1, rs_horizon(s2, c, 1))
    return max(worst, _rel_each(conserved_values(moved, c), conserved_values(s2, c)))


def check_flow_oracle(s1: SutherlandState, s2: RSState, c: Coupling) -> float:
    """Exact flows against RK4 integration of Hamilton's equations on the slice."""
    steps = Config.ORACLE_STEPS
    h = Config.GRADIENT_STEP
    j = min(2, s1.n)
    hid = HamiltonianId(Family.H, j)
    t = suth_horizon(s1, c, j, reach=1.0)
    worst = _rel(flow_suth(s1, c, j, t).coords, rk4_oracle(s1, c, hid, t, steps, h).coords)
    hid = HamiltonianId(Family.H_HAT, 1)
    t = rs_horizon(s2, c, 1, reach=1.0)
    return max(worst, _rel(flow_rs(s2, c, 1, t).coords, rk4_oracle(s2, c, hid, t, steps, h).coords))


def _sign_agnostic(slope: RealVector, rate: RealVector) -> float:
    # min over both global signs of the drift
    scale = 1.0 + float(np.max(np.abs(rate)))
    return min(float(np.max(np.abs(slope - sign * rate))) for sign in (1.0, -1.0)) / scale


def check_dual_linearization_suth(s: SutherlandState, c: Coupling, start: Optional[RSState] = None) -> float:
    """
    Along H_j flows the dual image has constant p_hat and q_hat affine in t
    with slope -+ p_hat^(j-1) (one global sign).
    """
    if start is None:
        start = suth_to_rs(s, c, preview=False).state
    worst = 0.0
    for j in range(1, min(s.n, 3) + 1):
        tau = suth_horizon(s, c, j, reach=0.25)
        dual = [start] + [suth_to_rs(flow_suth(s, c, j, t), c, preview=False).state for t in (tau, 2.0 * tau)]
        p0 = dual[0].p_hat
        drift = max(_rel(d.p_hat, p0) for d in dual[1:])
        q = [d.q_hat for d in dual]
        second = float(np.max(np.abs(q[0] - 2.0 * q[1] + q[2]))) / (1.0 + float(np.max(np.abs(q[1]))))
        slope = (q[2] - q[0]) / (2.0 * tau)
        worst = max(worst, drift, second, _sign_agnostic(slope, p0 ** (j - 1)) * tau)
    return worst


def check_dual_linearization_rs(s: RSState, c: Coupling, start: Optional[SutherlandState] = None) -> float:
    """Along H_hat_k flows the dual image has constant q and p affine in t with slope -+ e^{2kq}."""
    if start is None:
        start = rs_to_suth(s, c, preview=False).state
    worst = 0.0
    for k in RS_FLOW_INDICES:
        tau = rs_horizon(s, c, k, reach=0.25)
        dual = [start] + [rs_to_suth(flow_rs(s, c, k, t), c, preview=False).state for t in (tau, 2.0 * tau)]
        q0 = dual[0].q
        drift = max(_rel(d.q, q0) for d in dual[1:])
        p = [d.p for d in dual]
        second = float(np.max(np.abs(p[0] - 2.0 * p[1] + p[2]))) / (1.0 + float(np.max(np.abs(p[1]))))
        slope = (p[2] - p[0]) / (2.0 * tau)
        worst = max(worst, drift, second, _sign_agnostic(slope, np.exp(2.0 * k * q0)) * tau)
    return worst


# =========================================================================
# Batch orchestration
# =========================================================================

@dataclass(frozen=True, eq=False)
class Sample:
    """One random draw: a full-box and a smooth-box state of each model."""
    index: int
    coupling: Coupling
    suth: SutherlandState
    rs: RSState
    smooth_suth: SutherlandState
    smooth_rs: RSState

    @property
    def n(self) -> int:
        return self.coupling.n

    @cached_property
    def suth_dual(self) -> DualityResult[RSState]:
        """Forward map of the full-box Sutherland state, with its round trip."""
        return suth_to_rs(self.suth, self.coupling)

    @cached_property
    def rs_dual(self) -> DualityResult[SutherlandState]:
        return rs_to_suth(self.rs, self.coupling)


def draw_sample(seed: int, n_pos: int, kappa_pos: int, index: int, c: Coupling) -> Sample:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n_pos, kappa_pos, index)))
    smooth = {"low": Config.SMOOTH_LOW, "high": Config.SMOOTH_HIGH, "min_gap": Config.SMOOTH_MIN_GAP}
    return Sample(
        index=index,
        coupling=c,
        suth=random_sutherland(rng, c.n),
        rs=random_rs(rng, c.n),
        smooth_suth=random_sutherland(rng, c.n, **smooth),
        smooth_rs=random_rs(rng, c.n, **smooth),
    )


@dataclass(frozen=True)
class Check:
    name: str
    tol: str
    fn: Callable[[Sample], float]
    applies: Callable[[Sample], bool] = lambda smp: True


def _fd_sized(limit: int) -> Callable[[Sample], bool]:
    return lambda smp: smp.n <= Config.VERIFY_FD_MAX_N and smp.index < limit


def _roundtrip_suth(smp: Sample) -> float:
    return smp.suth_dual.residuals["roundtrip"] / (1.0 + norm_inf(smp.suth.coords))


def _roundtrip_rs(smp: Sample) -> float:
    return smp.rs_dual.residuals["roundtrip"] / (1.0 + norm_inf(smp.rs.coords))


def _moment(smp: Sample) -> float:
    c = smp.coupling
    return max(moment_residual(pt, c) / moment_scale(pt, c) for pt in (embed_s1(smp.suth, c), embed_s2(smp.rs, c)))


CHECKS: tuple[Check, ...] = tuple(sorted(
    (
        Check("commutation_s1", "commutation",
              lambda m: check_commutation_s1(m.suth, m.coupling) / commutation_scale_s1(m.suth, m.coupling)),
        Check("commutation_s2", "commutation",
              lambda m: check_commutation_s2(m.rs, m.coupling) / commutation_scale_s2(m.rs, m.coupling)),
        Check("det_identity", "det_identity", lambda m: check_det_identity(m.rs, m.coupling)),
        Check("dual_linearization_rs", "linearization",
              lambda m: check_dual_linearization_rs(m.rs, m.coupling, m.rs_dual.state)),
        Check("dual_linearization_suth", "linearization",
              lambda m: check_dual_linearization_suth(m.suth, m.coupling, m.suth_dual.state)),
        Check("eta_relation", "roundtrip", lambda m: check_eta_relation(m.suth, m.coupling, m.suth_dual)),
        Check("flow_constraint", "moment", lambda m: check_flow_constraint(m.suth, m.rs, m.coupling)),
        Check("flow_invariants", "flow_invariant", lambda m: check_flow_invariants(m.suth, m.rs, m.coupling)),
        Check("flow_oracle", "flow_oracle",
              lambda m: check_flow_oracle(m.smooth_suth, m.smooth_rs, m.coupling),
              _fd_sized(Config.VERIFY_ORACLE_SAMPLES)),
        Check("hamiltonian_identities", "hamiltonian",
              lambda m: check_hamiltonian_identities(m.suth, m.rs, m.coupling)),
        Check("moment_residual", "moment", _moment),
        Check("poisson_antisymmetry", "poisson_zero", lambda m: check_poisson_antisymmetry(m.smooth_rs, m.coupling)),
        Check("poisson_table", "poisson", lambda m: check_poisson_table(m.smooth_rs, m.coupling)),
        Check("pullback", "hamiltonian", lambda m: check_pullback(m.suth, m.rs, m.coupling)),
        Check("roundtrip_rs", "roundtrip", _roundtrip_rs),
        Check("roundtrip_suth", "roundtrip", _roundtrip_suth),
        Check("spectrum_exchange", "roundtrip",
              lambda m: check_spectrum_exchange(m.suth, m.coupling, m.suth_dual.state)),
        Check("symplectic", "symplectic",
              lambda m: symplectic_certificate(m.smooth_suth, m.coupling, Config.FD_STEP),
              _fd_sized(Config.VERIFY_SYMPLECTIC_SAMPLES)),
    ),
    key=lambda p: p.name,
))

Outcome = tuple[Optional[float], Optional[str]]


def run_sample(smp: Sample, checks: Sequence[Check] = CHECKS) -> dict[str, Outcome]:
    """Evaluate every applicable check on one sample; failures are recorded, not raised."""
    out: dict[str, Outcome] = {}
    for check in checks:
        if not check.applies(smp):
            continue
        try:
            value = float(check.fn(smp))
        except DualaxError as e:
            logger.debug("[verify] %s failed on sample %d (n=%d): %s", check.name, smp.index, smp.n, e)
            out[check.name] = (None, f"{type(e).__name__}: {e}")
            continue
        out[check.name] = (value, None) if math.isfinite(value) else (None, "non-finite residual")
    return out


class CheckResult(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    samples: int
    max_residual: Optional[float]
    tol: float
    passed: bool = Field(alias="pass")
    error: Optional[str] = None


class VerifyConfig(BaseModel):
    n: list[int]
    kappa: list[float]
    samples: int
    tolerances: dict[str, float]


class VerifyReport(BaseModel):
    """
    Summary:
    Aggregated verification outcome, one row per check family, sorted by name.
    Overall pass iff every row passes.
    """
    model_config = ConfigDict(populate_by_name=True)

    seed: int
    config: VerifyConfig
    checks: list[CheckResult] = Field(default_factory=list)
    passed: bool = Field(alias="pass")

    def to_dict(self) -> dict:
        return self.model_dump(by_alias=True)


def aggregate(results: Sequence[dict[str, Outcome]], tol: Tolerances, checks: Sequence[Check] = CHECKS) -> list[CheckResult]:
    rows: list[CheckResult] = []
    for check in sorted(checks, key=lambda p: p.name):
        outcomes = [r[check.name] for r in results if check.name in r]
        if not outcomes:
            continue
        values = [v for v, _ in outcomes if v is not None]
        errors = [e for _, e in outcomes if e is not None]
        limit = getattr(tol, check.tol)
        worst = max(values) if values else None
        ok = not errors and worst is not None and worst <= limit
        rows.append(CheckResult(
            name=check.name,
            samples=len(outcomes),
            max_residual=worst,
            tol=limit,
            passed=ok,
            error=errors[0] if errors else None,
        ))
    return rows


def run_all(
    n_list: Optional[Sequence[int]] = None,
    kappa_list: Optional[Sequence[float]] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    tolerances: Optional[Tolerances] = None,
    jobs: int = 1,
    progress: bool = False,
) -> VerifyReport:
    """
    Summary:
    Runs every check over random chamber states for each (n, kappa) pair.
    Deterministic given the seed: each sample has its own RNG stream keyed by
    (n position, kappa position, sample index), and rows are assembled in
    name order regardless of how the pool scheduled the work.
    """
    n_list = list(Config.VERIFY_N if n_list is None else n_list)
    kappa_list = [float(k) for k in (Config.VERIFY_KAPPA if kappa_list is None else kappa_list)]
    samples = Config.VERIFY_SAMPLES if samples is None else samples
    seed = Config.VERIFY_SEED if seed is None else seed
    tol = config.active() if tolerances is None else tolerances

    if isinstance(samples, bool) or int(samples) != samples or samples < 0:
        raise ConfigError(f"samples must be a non-negative integer, got {samples!r}")
    if isinstance(seed, bool) or int(seed) != seed or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs!r}")

    report_config = VerifyConfig(n=n_list, kappa=kappa_list, samples=int(samples), tolerances=tol.as_dict())

    with config.using(tol):
        try:
            couplings = [
                (ni, ki, Coupling(kappa, n))
                for ni, n in enumerate(n_list)
                for ki, kappa in enumerate(kappa_list)
            ]
        except ValidationError as e:
            raise ConfigError(f"invalid verification grid: {e}") from e
        tasks = [(ni, ki, i, c) for ni, ki, c in couplings for i in range(int(samples))]
        logger.info("[verify] seed=%d pairs=%d samples=%d jobs=%d", seed, len(couplings), samples, jobs)

        with tqdm(total=len(tasks), desc="[verify]", unit="sample", disable=not progress) as bar:

            def work(task: tuple[int, int, int, Coupling]) -> dict[str, Outcome]:
                ni, ki, i, c = task
                try:
                    out = run_sample(draw_sample(seed, ni, ki, i, c))
                finally:
                    bar.update(1)
                return out

            results = parallel_map(work, tasks, jobs)

        rows = aggregate(results, tol)

    for row in rows:
        logger.info(
            "[verify] check=%s samples=%d max_residual=%s tol=%.1e pass=%s",
            row.name, row.samples,
            "n/a" if row.max_residual is None else f"{row.max_residual:.3e}",
            row.tol, row.passed,
        )
    return VerifyReport(seed=int(seed), config=report_config, checks=rows, passed=all(r.passed for r in rows))
