"""Exception hierarchy shared across the package."""

from __future__ import annotations


class DimensionError(ValueError):
    """Operand dimensions are inconsistent with each other."""


class DomainError(ValueError):
    """A scalar function was evaluated outside its domain on a spectrum."""


class ParameterError(ValueError):
    """A numeric parameter is outside its documented range."""


class InvalidProtocolError(ValueError):
    """A protocol violates POVM completeness or decoder shape constraints."""


class ResourceError(RuntimeError):
    """An operation would exceed the configured dense-dimension cap."""


class SolverError(RuntimeError):
    """The SDP solver did not return a usable optimum."""


class EvaluationError(RuntimeError):
    """Every candidate point of an optimization failed to evaluate."""
