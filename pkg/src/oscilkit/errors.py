"""Exception types shared across the package."""


class OscilkitError(Exception):
    """Base class for all package errors."""


class DomainError(OscilkitError, ValueError):
    """Argument outside the domain where a quantity is defined."""


class ConvergenceError(OscilkitError, ArithmeticError):
    """Numerical procedure did not reach the requested accuracy.

    ``estimate`` carries the best value achieved, ``error`` its error bound.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class GrowthBoundError(OscilkitError, OverflowError):
    """Exponential growth factor would exceed double-precision range."""
