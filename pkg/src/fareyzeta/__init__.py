"""Transfer operators, Fredholm determinants and zeta functions of the Farey map."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    FareyZetaError,
    InconclusiveWinding,
    NoBracket,
    NonConvergence,
    PoleError,
    PoleWarning,
    ResourceError,
)

__all__ = [
    "DomainError",
    "FareyZetaError",
    "InconclusiveWinding",
    "NoBracket",
    "NonConvergence",
    "PoleError",
    "PoleWarning",
    "ResourceError",
    "__version__",
]
