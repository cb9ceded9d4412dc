"""Exception hierarchy."""


class GossipError(Exception):
    """Base class for errors raised by this package."""


class CapExceededError(GossipError):
    """An enumeration would exceed its configured size cap."""


class StructuralError(GossipError):
    """The topology or chain cannot reach consensus."""


class SingularMatrixError(StructuralError):
    """Gaussian elimination met a pivot below tolerance."""


class InfeasibleDensityError(GossipError):
    """No admissible random graph exists (or was found) at the requested density."""
