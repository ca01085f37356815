"""
Configuration - Centralized numerical settings for dualax

Tolerances are named constants on Config. The effective set is a frozen
Tolerances instance: defaults, times the DUALAX_TOL_SCALE multiplier, then any
explicit NAME=VALUE overrides.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, fields, replace
from typing import Iterable, Iterator, Mapping

from dualax.errors import ConfigError

TOL_SCALE_ENV = "DUALAX_TOL_SCALE"


class Config:
    """Configuration settings for dualax"""

    # =========================================================================
    # Matrix kernel
    # =========================================================================
    HERMITICITY = 1e-12     # times ||A||_inf
    UNITARITY = 1e-12       # times n
    COLLISION_GAP = 1e-10   # times (1 + ||H||_inf)
    SINGULAR = 1e-24        # min/max eigenvalue ratio of g g^dagger

    # =========================================================================
    # Model core
    # =========================================================================
    CHAMBER_GAP = 1e-10     # times (1 + max |coordinate|)
    KAPPA_MIN = 1e-12
    ORBIT_NORM = 1e-10      # times n

    # =========================================================================
    # Reduction engine
    # =========================================================================
    CONSTRAINT_INPUT = 1e-8  # times n * moment_scale
    PHASE_MODULUS = 1e-6
    SLICE_FORM = 1e-9

    # =========================================================================
    # Verification budgets
    # =========================================================================
    MOMENT = 1e-10
    ROUNDTRIP = 1e-8
    COMMUTATION = 1e-9
    DET_IDENTITY = 1e-9
    HAMILTONIAN = 1e-9
    SYMPLECTIC = 1e-4
    POISSON = 1e-5
    POISSON_ZERO = 1e-7
    FLOW_ORACLE = 1e-5
    FLOW_INVARIANT = 1e-9
    LINEARIZATION = 1e-8

    # =========================================================================
    # Finite-difference steps (not scaled by DUALAX_TOL_SCALE)
    # =========================================================================
    FD_STEP = 1e-5
    GRADIENT_STEP = 1e-6
    ORACLE_STEPS = 1000

    # =========================================================================
    # Verification defaults
    # =========================================================================
    VERIFY_N = (2, 3, 5)
    VERIFY_KAPPA = (0.5, 1.0, 2.0)
    VERIFY_SAMPLES = 50
    VERIFY_SEED = 42
    VERIFY_JOBS = min(8, os.cpu_count() or 1)

    # Random-state box used by the verification sampler
    SAMPLE_LOW = -3.0
    SAMPLE_HIGH = 3.0
    SAMPLE_MIN_GAP = 0.05

    # Narrower box for the finite-difference and integrator checks
    SMOOTH_LOW = -1.5
    SMOOTH_HIGH = 1.5
    SMOOTH_MIN_GAP = 0.3

    # Expensive checks run on a prefix of the samples, for n <= VERIFY_FD_MAX_N
    VERIFY_FD_MAX_N = 4
    VERIFY_SYMPLECTIC_SAMPLES = 20
    VERIFY_ORACLE_SAMPLES = 2
    POISSON_MAX_INDEX = 3


@dataclass(frozen=True)
class Tolerances:
    """Effective tolerance set; field names are the --tol override keys."""

    hermiticity: float = Config.HERMITICITY
    unitarity: float = Config.UNITARITY
    collision_gap: float = Config.COLLISION_GAP
    singular: float = Config.SINGULAR
    chamber_gap: float = Config.CHAMBER_GAP
    kappa_min: float = Config.KAPPA_MIN
    orbit_norm: float = Config.ORBIT_NORM
    constraint_input: float = Config.CONSTRAINT_INPUT
    phase_modulus: float = Config.PHASE_MODULUS
    slice_form: float = Config.SLICE_FORM
    moment: float = Config.MOMENT
    roundtrip: float = Config.ROUNDTRIP
    commutation: float = Config.COMMUTATION
    det_identity: float = Config.DET_IDENTITY
    hamiltonian: float = Config.HAMILTONIAN
    symplectic: float = Config.SYMPLECTIC
    poisson: float = Config.POISSON
    poisson_zero: float = Config.POISSON_ZERO
    flow_oracle: float = Config.FLOW_ORACLE
    flow_invariant: float = Config.FLOW_INVARIANT
    linearization: float = Config.LINEARIZATION

    def scaled(self, factor: float) -> "Tolerances":
        return replace(self, **{f.name: getattr(self, f.name) * factor for f in fields(self)})

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _positive_float(text: str, what: str) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{what} must be a number, got {text!r}") from e
    if not math.isfinite(value) or value <= 0.0:
        raise ConfigError(f"{what} must be a positive finite number, got {text!r}")
    return value


def env_scale() -> float:
    """Read the global tolerance multiplier from the environment (default 1)."""
    raw = os.getenv(TOL_SCALE_ENV)
    if raw is None or not raw.strip():
        return 1.0
    return _positive_float(raw.strip(), TOL_SCALE_ENV)


def parse_overrides(items: Iterable[str]) -> dict[str, float]:
    """Parse repeated NAME=VALUE strings from the command line."""
    out: dict[str, float] = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"tolerance override must look like NAME=VALUE, got {item!r}")
        out[name.strip()] = _positive_float(value.strip(), f"tolerance {name.strip()!r}")
    return out


def load_tolerances(overrides: Mapping[str, float] | None = None) -> Tolerances:
    """Defaults, scaled by DUALAX_TOL_SCALE, then explicit overrides (unscaled)."""
    tol = Tolerances().scaled(env_scale())
    if not overrides:
        return tol
    known = {f.name for f in fields(Tolerances)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ConfigError(f"unknown tolerance name(s): {', '.join(unknown)}. Known: {', '.join(sorted(known))}")
    return replace(tol, **dict(overrides))


_ACTIVE: ContextVar[Tolerances | None] = ContextVar("dualax_tolerances", default=None)


def active() -> Tolerances:
    """The tolerance set in effect for the current context."""
    tol = _ACTIVE.get()
    if tol is None:
        tol = load_tolerances()
        _ACTIVE.set(tol)
    return tol


def set_active(tol: Tolerances) -> None:
    _ACTIVE.set(tol)


@contextmanager
def using(tol: Tolerances) -> Iterator[Tolerances]:
    """Temporarily make `tol` the active tolerance set."""
    token = _ACTIVE.set(tol)
    try:
        yield tol
    finally:
        _ACTIVE.reset(token)
