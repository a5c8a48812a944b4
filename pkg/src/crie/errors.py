"""Exception types raised across the package."""


class CrieError(Exception):
    """Base class for all package errors."""


class InvalidParameter(CrieError, ValueError):
    """A distribution or configuration parameter is outside its domain."""


class InfiniteMean(CrieError, ValueError):
    """The operation needs a finite mean and the distribution has none."""


class InfiniteResult(CrieError, ArithmeticError):
    """A tail integral diverges."""


class NotConverged(CrieError, ArithmeticError):
    """Adaptive quadrature ran out of budget before meeting its tolerance.

    The partial result is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class InvalidWindow(CrieError, ValueError):
    """A truncation window is malformed (for instance tau1 >= tau2)."""


class DegenerateWindow(CrieError, ValueError):
    """The probability mass inside a window is numerically zero."""


class OutOfWindow(CrieError, ValueError):
    """A point lies outside the truncation window."""


class NonMonotoneTransform(CrieError, ValueError):
    """A transform is not strictly increasing where it must be."""


class DivergentDivergence(CrieError, ArithmeticError):
    """A Kullback-Leibler type divergence is infinite."""


class NonFiniteSample(CrieError, ValueError):
    """A monotonicity scan met a NaN or infinite value."""


class InsufficientData(CrieError, ValueError):
    """Too few observations for the requested estimate."""


class DataFormatError(CrieError, ValueError):
    """A data file could not be parsed."""
