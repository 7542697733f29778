"""Exception hierarchy shared by every zenorate module."""

from __future__ import annotations


class ZenoRateError(Exception):
    """Base class for all errors raised by zenorate."""


class DomainError(ZenoRateError, ValueError):
    """An argument lies outside the domain of the requested function."""


class DivergenceError(DomainError):
    """The requested quantity is infinite (e.g. Gamma(u, 0) with u <= 0)."""


class IntegrabilityError(ZenoRateError, ArithmeticError):
    """A half-line integral failed to converge or is divergent."""


class NumericalError(ZenoRateError, ArithmeticError):
    """A numerical routine stopped before reaching its tolerance.

    ``achieved`` carries the relative error estimate at the point of failure.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class CoverageError(DomainError):
    """A frequency cutoff leaves too much spectral weight uncovered."""


class IntegrationAccuracyError(NumericalError):
    """Norm drift of an amplitude integration exceeded its hard limit."""
