"""Exception hierarchy shared by all modules."""


class RmuqError(Exception):
    """Base class for library errors."""


class DomainError(RmuqError, ValueError):
    """Parameter outside the admissible domain."""


class ContractError(RmuqError, ValueError):
    """Input violates a structural contract (shape, sign, sum, ordering)."""


class MomentUndefinedError(DomainError):
    """Requested moment does not exist for the distribution."""


class NullRestrictionError(DomainError):
    """Restriction to a set of zero mass."""


class DegenerateVarianceError(RmuqError, ArithmeticError):
    """Index denominator is zero or numerically zero."""


class IntegrationError(RmuqError, ArithmeticError):
    """Integration strategy unavailable or integrand produced NaN."""


class LaplaceUnderflowError(RmuqError, ArithmeticError):
    """Laplace transform underflowed; rescale the integrand."""


class ConvergenceError(RmuqError, ArithmeticError):
    """Iterative solver did not converge.

    Attributes
    ----------
    last_iterate : object
        Final iterate when the solver stopped.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class ConfigError(RmuqError, ValueError):
    """Invalid run configuration."""


class NumericalWarning(RuntimeWarning):
    """Result computed but with degraded numerical guarantees."""
