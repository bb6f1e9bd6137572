"""Exception types shared across the package.

Every failure mode a caller is expected to branch on gets its own class;
anything else surfaces as ValueError from input validation.
"""

__all__ = [
    "UlamError",
    "NonConvergence",
    "InvalidLength",
    "DegenerateRoots",
    "NotUlamStable",
    "NotApplicable",
    "TolUnreachable",
    "MissingForcing",
    "TooLarge",
    "IllConditionedWarning",
]


class UlamError(Exception):
    """Base class for domain errors raised by this package."""


class NonConvergence(UlamError):
    """Root refinement failed to reach the residual target."""


class InvalidLength(UlamError):
    """A trajectory or forcing sequence is too short for the operation."""


class DegenerateRoots(UlamError):
    """Characteristic roots coincide or nearly coincide."""


class NotUlamStable(UlamError):
    """A characteristic root lies on (or within tolerance of) the unit circle."""


class NotApplicable(UlamError):
    """The requested quantity is undefined for this root configuration."""


class TolUnreachable(UlamError):
    """The certified truncation cannot reach the requested tolerance."""


class MissingForcing(UlamError):
    """Not enough forcing terms were supplied for the requested evaluation."""


class TooLarge(UlamError):
    """Problem size exceeds a brute-force oracle's hard cap."""


class IllConditionedWarning(UserWarning):
    """A linear solve produced a residual large enough to distrust."""
