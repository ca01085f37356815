from __future__ import annotations

import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from numpy.testing import assert_allclose

from dualax.errors import ConstraintViolated, PhaseDegeneracy, ValidationError
from dualax.models import Coupling, Family, HamiltonianId, RSState, SutherlandState, lax_rs
from dualax.reduction import (
    KElement,
    UnreducedPoint,
    act,
    condition_number,
    embed_s1,
    embed_s2,
    gauge_fix,
    gauge_fix_s1,
    gauge_fix_s2,
    gram_power,
    invariant_E,
    invariant_F,
    moment_residual,
    moment_scale,
    point_distance,
    unreduced_hamiltonian,
    _unit_phases,
)
from dualax.sampling import random_k
from golden import SQRT2
from strategies import rs_states, sutherland_states, with_coupling


def test_golden_embeddings_on_constraint_surface(golden_suth, golden_rs, kappa1):
    assert moment_residual(embed_s1(golden_suth, kappa1), kappa1) < 1e-12
    pt = embed_s2(golden_rs, kappa1)
    assert moment_residual(pt, kappa1) < 1e-12
    assert_allclose(pt.g @ pt.g, lax_rs(golden_rs, kappa1), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(with_coupling(sutherland_states(n_max=5)))
def test_embed_s1_moment_residual(sc):
    s, c = sc
    assert moment_residual(embed_s1(s, c), c) < 1e-10


@settings(max_examples=40, deadline=None)
@given(with_coupling(rs_states(n_max=5)))
def test_embed_s2_moment_residual(sc):
    s, c = sc
    assert moment_residual(embed_s2(s, c), c) < 1e-10


@settings(max_examples=25, deadline=None)
@given(with_coupling(sutherland_states()))
def test_gauge_fix_s1_fixes_slice_points(sc):
    s, c = sc
    out = gauge_fix_s1(embed_s1(s, c), c)
    assert_allclose(out.state.coords, s.coords, atol=1e-9)
    assert out.slice_residual < 1e-9


@settings(max_examples=25, deadline=None)
@given(with_coupling(rs_states()))
def test_gauge_fix_s2_fixes_slice_points(sc):
    s, c = sc
    out = gauge_fix_s2(embed_s2(s, c), c)
    assert_allclose(out.state.coords, s.coords, atol=1e-9)
    assert out.slice_residual < 1e-9


@pytest.mark.parametrize("model", ["sutherland", "rs"])
def test_gauge_fix_is_gauge_invariant(rng, generic_suth, model):
    c = Coupling(1.0, 2)
    pt = embed_s1(generic_suth, c)
    expected = gauge_fix(pt, c, model).state
    for _ in range(5):
        moved = act(random_k(rng, 2), pt)
        assert moment_residual(moved, c) < 1e-10
        assert_allclose(gauge_fix(moved, c, model).state.coords, expected.coords, atol=1e-9)


def test_transform_reaches_the_slice(generic_suth, generic_rs):
    c = Coupling(0.5, 2)
    pt = embed_s1(generic_suth, c)
    out = gauge_fix_s2(pt, c)
    assert point_distance(act(out.transform, pt), embed_s2(out.state, c)) < 1e-9
    pt = embed_s2(generic_rs, c)
    out = gauge_fix_s1(pt, c)
    assert point_distance(act(out.transform, pt), embed_s1(out.state, c)) < 1e-9


def test_gauge_fix_rejects_points_off_the_surface(golden_suth, kappa1):
    pt = embed_s1(golden_suth, kappa1)
    off = UnreducedPoint(g=pt.g, J=pt.J + 0.1j * np.eye(2), v=pt.v)
    with pytest.raises(ConstraintViolated):
        gauge_fix_s1(off, kappa1)
    with pytest.raises(ConstraintViolated):
        gauge_fix_s2(off, kappa1)


def test_gauge_fix_unknown_model(golden_suth, kappa1):
    with pytest.raises(ValidationError):
        gauge_fix(embed_s1(golden_suth, kappa1), kappa1, "calogero")


def test_unit_phases():
    z = np.array([1j, -1.0])
    assert_allclose(_unit_phases(z, "v", require_unit=True) * z, [1.0, 1.0], atol=1e-15)
    with pytest.raises(PhaseDegeneracy):
        _unit_phases(np.array([1.0, 0.0]), "u", require_unit=False)
    with pytest.raises(PhaseDegeneracy):
        _unit_phases(np.array([1.0, 0.5]), "v", require_unit=True)


def test_k_element(rng):
    with pytest.raises(ValidationError):
        KElement(np.eye(2), 2 * np.eye(2))
    k1, k2 = random_k(rng, 3), random_k(rng, 3)
    s = SutherlandState(q=[1.0, 0.1, -0.8], p=[0.2, 0.0, -0.4])
    pt = embed_s1(s, Coupling(1.0, 3))
    assert point_distance(act(k2 @ k1, pt), act(k2, act(k1, pt))) < 1e-12
    assert point_distance(act(k1.inverse(), act(k1, pt)), pt) < 1e-12


def test_unreduced_hamiltonians_pull_back(golden_suth, golden_rs, kappa1):
    p1 = embed_s1(golden_suth, kappa1)
    assert unreduced_hamiltonian(p1, HamiltonianId(Family.H, 2)) == pytest.approx(1.0, abs=1e-12)
    assert unreduced_hamiltonian(p1, HamiltonianId(Family.H_HAT, 1)) == pytest.approx(SQRT2, abs=1e-12)
    p2 = embed_s2(golden_rs, kappa1)
    assert unreduced_hamiltonian(p2, HamiltonianId(Family.H_HAT, 1)) == pytest.approx(SQRT2, abs=1e-12)
    assert unreduced_hamiltonian(p2, HamiltonianId(Family.H, 2)) == pytest.approx(1.0, abs=1e-12)


def test_invariants_on_s2(golden_rs, kappa1):
    pt = embed_s2(golden_rs, kappa1)
    assert invariant_F(pt, 1) == pytest.approx(0.0, abs=1e-14)
    assert invariant_F(pt, 2) == pytest.approx(1.0, abs=1e-14)
    assert invariant_E(pt, 1) == pytest.approx(2 * SQRT2, abs=1e-12)
    # (sqrt2 + 1)^2 + (sqrt2 - 1)^2 = 6
    assert invariant_E(pt, 2) == pytest.approx(3.0, abs=1e-12)


def test_unreduced_point_shapes():
    with pytest.raises(ValidationError):
        UnreducedPoint(g=np.eye(2), J=np.eye(3), v=np.ones(2))
    with pytest.raises(ValidationError):
        UnreducedPoint(g=np.eye(2), J=np.eye(2), v=np.array([1.0, np.inf]))


def test_moment_scale_is_a_real_number(generic_rs):
    c = Coupling(1.0, 2)
    pt = embed_s2(generic_rs, c)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        scale = moment_scale(pt, c)
    assert isinstance(scale, float)
    assert scale == pytest.approx(1.0 + 2.0 + condition_number(pt.g) * np.max(np.sum(np.abs(pt.J), axis=1)))
    assert condition_number(np.diag([4.0, 0.5]).astype(complex)) == pytest.approx(8.0)


def test_gram_power(rng):
    g = np.diag([2.0, 1.0]).astype(complex) @ random_k(rng, 2).eta_L
    outer = g @ g.conj().T
    inner = g.conj().T @ g
    assert_allclose(gram_power(g, 2), outer @ outer, atol=1e-12)
    assert_allclose(gram_power(g, -1), np.linalg.inv(outer), atol=1e-12)
    assert_allclose(gram_power(g, -2, outer=False), np.linalg.matrix_power(np.linalg.inv(inner), 2), atol=1e-12)


def test_embed_s2_keeps_det_on_clustered_momenta():
    s = RSState(p_hat=[1.0, 0.6, 0.2, -0.2, -0.6], q_hat=[-2.0, 1.5, 0.3, -1.0, 2.0])
    c = Coupling(1.0, 5)
    pt = embed_s2(s, c)
    sigma = np.linalg.svd(pt.g, compute_uv=False)
    assert 2.0 * np.sum(np.log(sigma)) == pytest.approx(-2.0 * np.sum(s.q_hat), abs=1e-8)
    assert moment_residual(pt, c) < 1e-10 * moment_scale(pt, c)
