"""Exception and warning types shared across the lab."""

from __future__ import annotations


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class DomainError(ValueError):
    """An evaluation left the mathematical domain of an operation."""


class StructuralError(ValueError):
    """Input data breaks a structural requirement (e.g. a non-symmetric matrix)."""


class RangeError(ValueError):
    """A query point lies outside the tabulated domain of a solution."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SaturationError(NumericalError):
    """Mode amplification overflowed double precision; the run must abort.

    ``diagnostics["modes"]`` lists ``(index, xi, log_growth)`` for every
    offending mode, so the caller can report which frequencies saturated
    instead of silently propagating infinities.
    """


class FitError(ValueError):
    """A bound fit was requested on degenerate data."""


class DomainTruncationWarning(UserWarning):
    """A solver shortened its domain (underflow or modulus-argument limit)."""
