"""
Random chamber states and random group elements for verification runs.
Coordinates are drawn from a bounded box with a guaranteed minimal gap
between neighbours, so every sample sits well inside the chamber.
"""

from __future__ import annotations

import numpy as np

from dualax.config import Config
from dualax.errors import ConfigError
from dualax.linalg import ComplexMatrix, RealVector
from dualax.models import RSState, SutherlandState
from dualax.reduction import KElement


def ordered_gapped(
    rng: np.random.Generator,
    n: int,
    low: float = Config.SAMPLE_LOW,
    high: float = Config.SAMPLE_HIGH,
    min_gap: float = Config.SAMPLE_MIN_GAP,
) -> RealVector:
    """
    Strictly decreasing n-vector in [low, high] with neighbour gaps >= min_gap,
    uniform over all such configurations.
    """
    span = high - low - (n - 1) * min_gap
    if n < 1 or span <= 0.0:
        raise ConfigError(f"cannot place {n} points with gap {min_gap} in [{low}, {high}]")
    base = np.sort(rng.uniform(0.0, span, size=n))
    return (low + base + min_gap * np.arange(n))[::-1].copy()


def random_sutherland(rng: np.random.Generator, n: int, **box: float) -> SutherlandState:
    q = ordered_gapped(rng, n, **box)
    p = rng.uniform(box.get("low", Config.SAMPLE_LOW), box.get("high", Config.SAMPLE_HIGH), size=n)
    return SutherlandState(q=q, p=p)


def random_rs(rng: np.random.Generator, n: int, **box: float) -> RSState:
    p_hat = ordered_gapped(rng, n, **box)
    q_hat = rng.uniform(box.get("low", Config.SAMPLE_LOW), box.get("high", Config.SAMPLE_HIGH), size=n)
    return RSState(p_hat=p_hat, q_hat=q_hat)


def crandn(rng: np.random.Generator, size: tuple[int, ...]) -> np.ndarray:
    """Standard complex normal samples."""
    return (rng.normal(size=size) + 1j * rng.normal(size=size)) / np.sqrt(2)


def random_unitary(rng: np.random.Generator, n: int) -> ComplexMatrix:
    """Haar-distributed unitary: QR of a complex Gaussian with R's diagonal made positive."""
    q, r = np.linalg.qr(crandn(rng, (n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def random_k(rng: np.random.Generator, n: int) -> KElement:
    return KElement(random_unitary(rng, n), random_unitary(rng, n))
