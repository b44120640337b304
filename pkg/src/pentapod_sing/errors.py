"""Exception and warning types."""


class PentapodError(Exception):
    """Base class for library errors."""


class PolynomialError(PentapodError, ValueError):
    pass


class ArchitectureError(PentapodError, ValueError):
    """Invalid or architecturally degenerate manipulator design."""


class DegenerateSpecializationError(PentapodError):
    """F vanishes identically after fixing the orientation or the position."""


class ExclusionError(PentapodError):
    """Input lies in a set the rational parametrization does not cover."""


class NorthPoleError(ExclusionError):
    pass


class LineOnQuadricError(ExclusionError):
    pass


class NotSingularError(PentapodError):
    pass


class SolverError(PentapodError):
    pass


class NonGenericWarning(UserWarning):
    """Elimination produced an unexpected degree; a fallback path was used."""


class DegenerateCandidateWarning(UserWarning):
    """A stationary-point candidate was dropped (multiplier at infinity etc.)."""
