"""Exception types shared across the package."""


class CVQKDError(Exception):
    """Base class for all package errors."""


class PhysicalityError(CVQKDError, ValueError):
    """A covariance matrix violates the uncertainty principle."""


class NumericError(CVQKDError, ArithmeticError):
    """A numerical routine failed to converge or overflowed."""


class DegenerateInputError(CVQKDError, ValueError):
    """Input vector with zero norm where a direction is required."""


class EstimationError(CVQKDError, ValueError):
    """Parameter estimation cannot proceed on the supplied samples."""


class UsageError(CVQKDError, ValueError):
    """Inconsistent arguments supplied by the caller."""
