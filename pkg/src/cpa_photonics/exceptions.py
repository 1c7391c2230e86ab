"""Exception hierarchy.

Input problems derive from ``InvalidInputError`` and numeric failures from
``NumericalError``; the CLI maps them to exit codes 2 and 3.
"""

from typing import Optional


class CpaError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InvalidInputError(CpaError, ValueError):
    """Invalid input value, shape or configuration."""

    exit_code = 2


class DimensionError(InvalidInputError):
    """Matrix or vector has the wrong shape or size."""


class DomainError(InvalidInputError):
    """Physical parameter outside its admissible domain."""


class CapacityError(InvalidInputError):
    """Requested Fock basis is too large."""


class GainUnsupportedError(InvalidInputError):
    """Transformation has a singular value above one."""


class DataError(InvalidInputError):
    """Measured or simulated data is inconsistent."""


class GridMismatchError(DataError):
    """Curves do not share the same phase grid."""


class EmptyDataError(DataError):
    """No counts to normalize."""


class DegenerateFitError(InvalidInputError):
    """Fit parameters do not define the requested quantity."""


class UndefinedG2Error(InvalidInputError):
    """Heralded g2 denominator is zero."""


class OutOfRangeError(InvalidInputError):
    """Requested heater drive exceeds the driver limit."""


class InvalidConfigError(InvalidInputError):
    """Malformed sweep or calibration configuration."""


class NumericalError(CpaError, ArithmeticError):
    """Numeric failure during compilation, simulation or fitting."""

    exit_code = 3


class PreconditionError(NumericalError):
    """Matrix expected to be unitary is not."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class FitError(NumericalError):
    """Least-squares fit could not be performed."""


class ConvergenceError(FitError):
    """Iterative refinement did not converge."""
