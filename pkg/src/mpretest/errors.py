"""Exception types shared across the package."""


class MpretestError(Exception):
    """Base class for all package-specific errors."""


class EmptyInput(MpretestError):
    """Fewer observations than the minimum the operation supports."""


class DegenerateDesign(MpretestError):
    """Constant regressor: the slope is unidentifiable and every test is undefined."""


class NoSignChange(MpretestError):
    """A monotone statistic kept one sign over the maximal search bracket."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class ZeroVariance(MpretestError):
    """A variance estimator came out zero, so the statistic cannot be standardized."""


class DomainError(MpretestError, ValueError):
    """Argument outside the mathematical domain of the function."""


class InvalidParams(MpretestError, ValueError):
    """Parameter set violates a documented invariant."""


class PreconditionError(MpretestError):
    """Operation called outside its stated precondition."""
