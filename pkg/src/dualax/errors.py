"""
Summary:
Exception hierarchy for dualax.
Every error carries the process exit code the CLI maps it to:
2 for bad input or configuration, 3 for numerical degeneracy.
"""

from __future__ import annotations


class DualaxError(Exception):
    """Summary: Root of all dualax failures."""

    exit_code = 2


class ConfigError(DualaxError):
    """Summary: Raised for invalid tolerance overrides, env values or CLI flags."""


class ValidationError(DualaxError):
    """Summary: Raised when a state, point or file fails schema validation."""


class ChamberViolation(ValidationError):
    """Summary: Raised when coordinates leave the open Weyl chamber."""


class OrbitViolation(ValidationError):
    """Summary: Raised when an orbit vector does not satisfy |v|^2 = n."""


class IndexOutOfRange(ValidationError):
    """Summary: Raised for a Hamiltonian index outside its family's range."""


class NonHermitianInput(DualaxError):
    """Summary: Raised when a matrix expected to be Hermitian is not."""


class NotPositiveDefinite(DualaxError):
    """Summary: Raised when a matrix expected to be positive definite is not."""


class SingularMatrix(DualaxError):
    """Summary: Raised when a matrix expected to be invertible is (numerically) singular."""


class ConstraintViolated(DualaxError):
    """Summary: Raised when gauge fixing is asked for a point off the constraint surface."""


class CollidingEigenvalues(DualaxError):
    """Summary: Raised when an ordered spectrum hits a chamber wall."""

    exit_code = 3


class PhaseDegeneracy(DualaxError):
    """Summary: Raised when an orbit-vector component cannot be phase-fixed."""

    exit_code = 3
