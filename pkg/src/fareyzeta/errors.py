"""Exception and warning types shared across the package."""


class FareyZetaError(Exception):
    """Base class for all package errors."""


class DomainError(FareyZetaError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class PoleError(DomainError):
    """The function has a pole at the requested argument."""


class NonConvergence(FareyZetaError, ArithmeticError):
    """A series, quadrature or iteration did not reach its tolerance."""


class ResourceError(FareyZetaError):
    """A request would exceed a configured size cap."""


class NoBracket(FareyZetaError):
    """A root-finding bracket does not contain a sign change."""


class InconclusiveWinding(FareyZetaError):
    """The argument principle could not produce a trustworthy winding number."""


class PoleWarning(UserWarning):
    """A value was evaluated close to a pole and is numerically unreliable."""
