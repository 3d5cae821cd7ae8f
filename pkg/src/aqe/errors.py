"""Exception types raised across the package."""


class AqeError(Exception):
    """Base class for all package errors."""


class PoleError(AqeError, ValueError):
    pass


class DomainError(AqeError, ValueError):
    pass


class NotInjectiveError(AqeError, ValueError):
    pass


class ResolutionError(AqeError):
    pass


class NoConvergenceError(AqeError):
    pass


class IllConditionedError(AqeError):
    pass


class TruncationError(AqeError):
    pass


class IncompleteCatalogError(AqeError):
    pass


class CoefficientShortfallError(AqeError):
    pass


class ConductorTooLargeError(AqeError):
    pass


class UnramifiedOnlyError(AqeError):
    pass


class NotFundamentalError(AqeError, ValueError):
    pass


class ZeroOnBoundaryError(AqeError):
    pass


class NonIntegerWindingError(AqeError):
    pass


class TailDivergenceError(AqeError):
    pass


class NearPoleError(AqeError):
    pass


class MissingFieldError(AqeError, KeyError):
    pass


class EmptyFamilyError(AqeError):
    pass


class SchemaVersionError(AqeError):
    pass
