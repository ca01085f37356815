from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

from dualax.errors import CollidingEigenvalues, NonHermitianInput, NotPositiveDefinite, SingularMatrix, ValidationError
from dualax.linalg import (
    dagger,
    det,
    eigh_desc,
    eigh_pd_pair,
    exp_herm,
    herm_power,
    logdet_pd,
    pd_power,
    polar_left,
    polar_right,
    require_simple,
    sqrt_pd,
    unitarity_defect,
)
from dualax.sampling import crandn, random_unitary


def random_hermitian(rng, n):
    x = crandn(rng, (n, n))
    return 0.5 * (x + dagger(x))


def random_pd(rng, n):
    x = crandn(rng, (n, n))
    return x @ dagger(x) + n * np.eye(n)


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_eigh_desc_sorted_and_reconstructs(rng, n):
    h = random_hermitian(rng, n)
    eig = eigh_desc(h)
    assert np.all(np.diff(eig.values) <= 0.0)
    assert_allclose(eig.reconstruct(), h, atol=1e-12)
    assert unitarity_defect(eig.basis) < 1e-12


def test_eigh_desc_phase_convention(rng):
    eig = eigh_desc(random_hermitian(rng, 4))
    for col in eig.basis.T:
        pivot = col[np.argmax(np.abs(col))]
        assert abs(pivot.imag) < 1e-15
        assert pivot.real > 0.0


def test_eigh_desc_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        eigh_desc(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_non_square_input():
    with pytest.raises(ValidationError):
        eigh_desc(np.ones((2, 3)))


def test_sqrt_pd_example():
    root = sqrt_pd(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert_allclose(root, [[1.3660254, 0.3660254], [0.3660254, 1.3660254]], atol=1e-7)
    assert_allclose(root @ root, [[2.0, 1.0], [1.0, 2.0]], atol=1e-12)


def test_sqrt_pd_matches_scipy(rng):
    p = random_pd(rng, 5)
    assert_allclose(sqrt_pd(p), scipy.linalg.sqrtm(p), atol=1e-10)


def test_pd_functions_reject_indefinite():
    with pytest.raises(NotPositiveDefinite):
        sqrt_pd(np.diag([1.0, -1.0]))
    with pytest.raises(NotPositiveDefinite):
        pd_power(np.diag([2.0, 0.0]), -1)


def test_pd_power_negative(rng):
    p = random_pd(rng, 4)
    assert_allclose(pd_power(p, -1) @ p, np.eye(4), atol=1e-10)
    assert_allclose(pd_power(p, 0.5), sqrt_pd(p), atol=1e-12)


def test_herm_power(rng):
    h = random_hermitian(rng, 3)
    assert_allclose(herm_power(h, 3), h @ h @ h, atol=1e-10)
    assert_allclose(herm_power(h, 0), np.eye(3), atol=0)


def test_exp_herm_example():
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert_allclose(exp_herm(x, 1.0).real, [[1.5430806, 1.1752012], [1.1752012, 1.5430806]], atol=1e-7)
    assert_allclose(exp_herm(x, 0.0), np.eye(2), atol=1e-15)


def test_exp_herm_matches_scipy(rng):
    h = random_hermitian(rng, 5)
    assert_allclose(exp_herm(h, 0.7), scipy.linalg.expm(0.7 * h), rtol=1e-10, atol=1e-10)


def test_polar_right_matches_scipy(rng):
    g = crandn(rng, (4, 4))
    g_minus, g_plus = polar_right(g)
    u, p = scipy.linalg.polar(g, side="left")
    assert_allclose(g_minus, p, atol=1e-10)
    assert_allclose(g_plus, u, atol=1e-10)
    assert_allclose(g_minus @ g_plus, g, atol=1e-12)
    assert unitarity_defect(g_plus) < 1e-12


def test_polar_left_matches_scipy(rng):
    g = crandn(rng, (4, 4))
    h_plus, h_minus = polar_left(g)
    u, p = scipy.linalg.polar(g, side="right")
    assert_allclose(h_plus, u, atol=1e-10)
    assert_allclose(h_minus, p, atol=1e-10)
    assert_allclose(h_plus @ h_minus, g, atol=1e-12)


@pytest.mark.parametrize("g", [np.zeros((2, 2)), np.ones((2, 2))])
def test_polar_rejects_singular(g):
    with pytest.raises(SingularMatrix):
        polar_right(g)
    with pytest.raises(SingularMatrix):
        polar_left(g)


def test_require_simple():
    require_simple(np.array([2.0, 1.0, 0.0]), 2.0)
    with pytest.raises(CollidingEigenvalues):
        require_simple(np.array([1.0, 1.0]), 1.0)


def test_det_of_rs_example(golden_l2):
    assert abs(det(golden_l2) - 1.0) < 1e-12


def test_logdet_pd(golden_l2, rng):
    assert logdet_pd(golden_l2) == pytest.approx(0.0, abs=1e-14)
    p = random_pd(rng, 5)
    assert logdet_pd(p) == pytest.approx(np.log(det(p).real), rel=1e-12)
    with pytest.raises(NotPositiveDefinite):
        logdet_pd(np.diag([1.0, -1.0]))


def test_eigh_pd_pair_resolves_a_wide_spectrum(rng):
    u = random_unitary(rng, 6)
    lam = np.logspace(3, -11, 6)
    p = (u * lam[None, :]) @ dagger(u)
    p_inv = (u / lam[None, :]) @ dagger(u)
    eig = eigh_pd_pair(p, p_inv)
    assert_allclose(eig.values, lam, rtol=1e-9)
    assert unitarity_defect(eig.basis) < 1e-12
    assert_allclose(eig.reconstruct(), p, atol=1e-12 * lam[0])
    assert_allclose(eig.apply(lambda x: 1.0 / x), p_inv, atol=1e-8 / lam[-1])
