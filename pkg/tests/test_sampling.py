import numpy as np
import pytest

from dualax.errors import ConfigError
from dualax.models import RSState, SutherlandState
from dualax.sampling import crandn, ordered_gapped, random_k, random_rs, random_sutherland, random_unitary


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_ordered_gapped_respects_box_and_gap(rng, n):
    for _ in range(50):
        x = ordered_gapped(rng, n, low=-1.0, high=2.0, min_gap=0.25)
        assert x.shape == (n,)
        assert np.all(x >= -1.0 - 1e-12) and np.all(x <= 2.0 + 1e-12)
        assert np.all(-np.diff(x) >= 0.25 - 1e-12)


def test_ordered_gapped_impossible_box(rng):
    with pytest.raises(ConfigError):
        ordered_gapped(rng, 4, low=0.0, high=1.0, min_gap=0.5)
    with pytest.raises(ConfigError):
        ordered_gapped(rng, 0)


def test_random_states_are_chamber_states(rng):
    s = random_sutherland(rng, 4)
    r = random_rs(rng, 4, low=-1.5, high=1.5, min_gap=0.3)
    assert isinstance(s, SutherlandState) and isinstance(r, RSState)
    assert np.all(np.abs(r.coords) <= 1.5)


def test_sampling_is_reproducible():
    a = random_rs(np.random.default_rng(7), 3)
    b = random_rs(np.random.default_rng(7), 3)
    np.testing.assert_array_equal(a.coords, b.coords)


def test_crandn_shape_and_scale(rng):
    z = crandn(rng, (4000,))
    assert z.dtype == np.complex128
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.1)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_random_unitary(rng, n):
    u = random_unitary(rng, n)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(n), atol=1e-12)


def test_random_k_is_unitary_pair(rng):
    k = random_k(rng, 3)
    for u in (k.eta_L, k.eta_R):
        np.testing.assert_allclose(u @ u.conj().T, np.eye(3), atol=1e-12)
