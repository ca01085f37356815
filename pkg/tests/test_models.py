from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from numpy.testing import assert_allclose

from dualax.errors import ChamberViolation, IndexOutOfRange, NotPositiveDefinite, OrbitViolation, ValidationError
from dualax.linalg import eigh_desc, hermitian_defect
from dualax.models import (
    Coupling,
    Family,
    HamiltonianId,
    RSState,
    SutherlandState,
    cauchy_factor,
    cauchy_inverse,
    ham_rs,
    ham_rs_explicit,
    ham_suth,
    lax_rs,
    lax_rs_inverse,
    lax_suth,
    mu_kappa,
    reduced_hamiltonian,
    slice_hamiltonian,
    u_vec,
    v_vec,
    xi_of_v,
)
from golden import SQRT2
from strategies import rs_states, sutherland_states, with_coupling


def test_lax_suth_golden(golden_suth, kappa1):
    assert_allclose(lax_suth(golden_suth, kappa1), [[0, -1j], [1j, 0]], atol=1e-12)


def test_lax_suth_n1():
    s = SutherlandState(q=[0.3], p=[-1.25])
    assert_allclose(lax_suth(s, Coupling(1.0, 1)), [[-1.25]], atol=0)


def test_lax_rs_golden(golden_rs, kappa1, golden_l2):
    lax = lax_rs(golden_rs, kappa1)
    assert_allclose(lax, golden_l2, atol=1e-12)
    assert_allclose(eigh_desc(lax).values, [SQRT2 + 1, SQRT2 - 1], atol=1e-12)
    assert_allclose(u_vec(golden_rs, kappa1), [2**0.25, 2**0.25], rtol=1e-14)


def test_lax_rs_n1():
    s = RSState(p_hat=[0.4], q_hat=[0.35])
    assert_allclose(lax_rs(s, Coupling(0.5, 1)), [[np.exp(-0.7)]], rtol=1e-14)


@settings(max_examples=30, deadline=None)
@given(with_coupling(sutherland_states()))
def test_lax_suth_hermitian(sc):
    s, c = sc
    assert hermitian_defect(lax_suth(s, c)) < 1e-14


@settings(max_examples=30, deadline=None)
@given(with_coupling(rs_states()))
def test_lax_rs_positive_definite_and_v_on_orbit(sc):
    s, c = sc
    assert eigh_desc(lax_rs(s, c)).values[-1] > 0.0
    v = v_vec(s, c)
    assert abs(np.vdot(v, v).real - s.n) < 1e-10 * s.n


def test_hamiltonians_golden(golden_suth, golden_rs, kappa1):
    assert ham_suth(golden_suth, kappa1) == pytest.approx(1.0, abs=1e-12)
    assert ham_rs(golden_rs, kappa1) == pytest.approx(2 * SQRT2, abs=1e-12)
    assert ham_rs_explicit(golden_rs, kappa1) == pytest.approx(2 * SQRT2, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(with_coupling(rs_states()))
def test_ham_rs_trace_and_cosh_forms_agree(sc):
    s, c = sc
    assert ham_rs(s, c) == pytest.approx(ham_rs_explicit(s, c), rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(with_coupling(rs_states(n_max=5)))
def test_cauchy_inverse_matches_dense_inverse(sc):
    s, c = sc
    C = cauchy_factor(s.p_hat, c.kappa)
    assert_allclose(cauchy_inverse(s.p_hat, c.kappa) @ C, np.eye(s.n), atol=1e-8)


def test_cauchy_inverse_two_particles():
    d, kappa = 0.3, 0.7
    inv = cauchy_inverse(np.array([d / 2, -d / 2]), kappa)
    a = 2j * kappa / (2j * kappa + d)
    assert_allclose(np.diag(inv), [1 + 4 * kappa**2 / d**2] * 2, rtol=1e-14)
    assert inv[0, 1] == pytest.approx(-a / (1 - abs(a) ** 2), rel=1e-13)


def test_lax_rs_inverse_clustered_momenta():
    # p_hat spacing far below 2 kappa makes L2 nearly rank one
    s = RSState(p_hat=[0.02, 0.0, -0.02], q_hat=[0.1, 0.0, -0.3])
    c = Coupling(2.0, 3)
    inv = lax_rs_inverse(s, c)
    assert_allclose(inv @ lax_rs(s, c), np.eye(3), atol=1e-4)
    assert ham_rs(s, c) == pytest.approx(ham_rs_explicit(s, c), rel=1e-12)


def test_reduced_hamiltonian_families(golden_suth, golden_rs, kappa1):
    l1 = lax_suth(golden_suth, kappa1)
    assert reduced_hamiltonian(l1, HamiltonianId(Family.H, 2)) == pytest.approx(1.0, abs=1e-12)
    l2 = lax_rs(golden_rs, kappa1)
    assert reduced_hamiltonian(l2, HamiltonianId(Family.H_HAT, 1)) == pytest.approx(SQRT2, abs=1e-12)
    # (1/2k) tr L2^k at k = -1 carries the sign of k
    assert reduced_hamiltonian(l2, HamiltonianId(Family.H_HAT, -1)) == pytest.approx(-SQRT2, abs=1e-12)
    assert slice_hamiltonian(golden_rs, kappa1, HamiltonianId(Family.H_HAT, -1)) == pytest.approx(-SQRT2, abs=1e-12)
    with pytest.raises(NotPositiveDefinite):
        reduced_hamiltonian(l1, HamiltonianId(Family.H_HAT, 1))


def test_reduced_hamiltonian_negative_power_scalar():
    l2 = [[np.exp(-2 * 0.5)]]
    assert reduced_hamiltonian(l2, HamiltonianId(Family.H_HAT, -1)) == pytest.approx(-1.3591409142, abs=1e-9)
    s = RSState(p_hat=[0.0], q_hat=[0.5])
    value = slice_hamiltonian(s, Coupling(1.0, 1), HamiltonianId(Family.H_HAT, -1))
    assert value == pytest.approx(-0.5 * np.e, rel=1e-14)


def test_cross_family_on_sutherland_slice(golden_suth, golden_rs, kappa1):
    # Hhat_1 on S1 is sum e^{2q} / 2, the same value tr L2 / 2 takes at the dual point
    value = slice_hamiltonian(golden_suth, kappa1, HamiltonianId(Family.H_HAT, 1))
    assert value == pytest.approx(SQRT2, abs=1e-12)
    assert slice_hamiltonian(golden_rs, kappa1, HamiltonianId(Family.H, 1)) == 0.0


@pytest.mark.parametrize(
    "q",
    [[0.0, 0.5], [0.2, 0.2], [1.0, 0.0, 0.5]],
)
def test_chamber_violation(q):
    with pytest.raises(ChamberViolation):
        SutherlandState(q=q, p=[0.0] * len(q))
    with pytest.raises(ChamberViolation):
        RSState(p_hat=q, q_hat=[0.0] * len(q))


@pytest.mark.parametrize(
    "q, p",
    [([1.0, 0.0], [0.0]), ([], []), ([np.nan], [0.0]), ([[1.0]], [[0.0]])],
)
def test_malformed_state(q, p):
    with pytest.raises(ValidationError):
        SutherlandState(q=q, p=p)


def test_coupling_validation(golden_suth):
    with pytest.raises(ValidationError):
        Coupling(0.0, 2)
    with pytest.raises(ValidationError):
        Coupling(1.0, 0)
    with pytest.raises(ValidationError):
        lax_suth(golden_suth, Coupling(1.0, 3))


def test_hamiltonian_index_ranges():
    for hid in (HamiltonianId(Family.H_HAT, -3), HamiltonianId("Hhat", 2), HamiltonianId(Family.H, 7)):
        hid.validate()
    for hid in (HamiltonianId(Family.H, 0), HamiltonianId(Family.H, -1), HamiltonianId(Family.H_HAT, 0)):
        with pytest.raises(IndexOutOfRange):
            hid.validate()
    assert [h.label for h in HamiltonianId.family_ids(Family.H_HAT, 3)] == ["Hhat1", "Hhat2", "Hhat3"]


def test_powers_past_n_are_dependent(generic_suth):
    # Cayley-Hamilton for n = 2: tr L^3 = e1 tr L^2 - e2 tr L
    c = Coupling(1.0, 2)
    lam = eigh_desc(lax_suth(generic_suth, c)).values
    e1, e2 = lam.sum(), lam.prod()
    h = {j: slice_hamiltonian(generic_suth, c, HamiltonianId(Family.H, j)) for j in (1, 2, 3)}
    assert 3 * h[3] == pytest.approx(e1 * 2 * h[2] - e2 * h[1], rel=1e-10, abs=1e-10)


def test_orbit_vector(kappa1):
    assert_allclose(xi_of_v(np.ones(2), kappa1), -mu_kappa(kappa1), atol=0)
    with pytest.raises(OrbitViolation):
        xi_of_v(np.array([1.0, 0.5]), kappa1)
