from __future__ import annotations

import numpy as np
import pytest

from dualax import config
from dualax.config import TOL_SCALE_ENV, Tolerances
from dualax.models import Coupling, RSState, SutherlandState
from golden import A, SQRT2


@pytest.fixture(autouse=True)
def default_tolerances(monkeypatch):
    monkeypatch.delenv(TOL_SCALE_ENV, raising=False)
    with config.using(Tolerances()):
        yield


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def kappa1() -> Coupling:
    return Coupling(1.0, 2)


@pytest.fixture
def golden_suth() -> SutherlandState:
    return SutherlandState(q=[A, -A], p=[0.0, 0.0])


@pytest.fixture
def golden_rs() -> RSState:
    return RSState(p_hat=[1.0, -1.0], q_hat=[0.0, 0.0])


@pytest.fixture
def golden_l2() -> np.ndarray:
    off = (1 + 1j) / SQRT2
    return np.array([[SQRT2, off], [off.conjugate(), SQRT2]])


@pytest.fixture
def generic_suth() -> SutherlandState:
    return SutherlandState(q=[0.9, -0.2], p=[0.3, -0.5])


@pytest.fixture
def generic_rs() -> RSState:
    return RSState(p_hat=[0.8, -0.6], q_hat=[0.2, -0.1])
