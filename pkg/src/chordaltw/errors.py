"""Exception types shared across the package."""


class ChordalTwError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ChordalTwError):
    """Invalid parameters, mismatched variable sets or truncations."""


class DomainError(ChordalTwError):
    """Input outside the mathematical domain of an operation."""


class RangeError(ChordalTwError):
    """Query outside the tabulated / truncated range (distinct from a true zero)."""


class PrecisionError(ChordalTwError):
    """Requested tolerance cannot be certified; carries the achieved bound."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ConsistencyError(ChordalTwError):
    """Internal invariant violated (e.g. a coefficient recursion fed on itself)."""


class ResourceError(ChordalTwError):
    """Refused because the exact computation would be too large."""


class SamplerFailure(ChordalTwError):
    """A rejection sampler exhausted its attempt budget."""

    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts
