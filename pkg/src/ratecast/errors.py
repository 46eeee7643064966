"""Exception types shared across the package."""


class RatecastError(Exception):
    """Base class for all package-specific failures."""


class LoadError(RatecastError):
    """Raised when a rate-matrix file cannot be parsed."""


class ClassificationError(RatecastError):
    """Raised when a maturity label fits no known naming convention."""


class FitError(RatecastError):
    """Raised when a distribution fit is impossible (degenerate input)."""


class GofTestError(RatecastError):
    """Raised when a goodness-of-fit test cannot be evaluated."""


class ShiftError(RatecastError):
    """Raised when no positivity shift yields strictly positive values."""


class NumericError(RatecastError):
    """Raised when a numeric routine fails to converge within its caps."""


class PipelineError(RatecastError):
    """Raised when a fit/forecast pipeline cannot produce a usable result."""
