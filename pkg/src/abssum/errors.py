"""Exception hierarchy shared by the package."""

from __future__ import annotations


class SummabilityError(Exception):
    """Base class for all package errors."""


class DomainError(SummabilityError, ValueError):
    """An argument or forced sequence value lies outside its domain.

    ``index`` names the offending sequence index when there is one.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class AccuracyError(SummabilityError, ArithmeticError):
    """A numerical routine (quadrature) failed to reach its tolerance."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class ConfigError(SummabilityError, ValueError):
    """An experiment configuration failed validation."""

    def __init__(self, message: str, field: str | None = None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
