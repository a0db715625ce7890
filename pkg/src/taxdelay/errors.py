"""Exception types shared across the library."""

from __future__ import annotations


class InvalidParameter(ValueError):
    """A model or problem parameter is outside its admissible range."""


class DomainError(ValueError):
    """A function argument is outside the domain of the requested quantity."""


class InvalidConfig(ValueError):
    """A simulation or run configuration is inconsistent."""


class ToleranceNotMet(ArithmeticError):
    """A quadrature routine could not reach the requested tolerance."""


class BracketFailure(ArithmeticError):
    """Root bracketing failed: no sign change found within the search cap."""


class EventCapExceeded(RuntimeError):
    """A simulated path exceeded the hard per-path event budget."""
