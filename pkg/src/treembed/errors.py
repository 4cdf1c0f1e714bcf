"""Exception types raised across the package."""


class TreembedError(Exception):
    """Base class for all package errors."""


class SizeError(TreembedError, ValueError):
    """Requested instance is too large to build or enumerate."""


class ConnectivityError(TreembedError, ValueError):
    pass


class ValidationError(TreembedError, ValueError):
    """Input violates a structural invariant (monotonicity, metric axioms, ...)."""


class DomainError(TreembedError, ValueError):
    """Argument outside the domain of a modulus or bound."""


class InjectivityError(TreembedError, ValueError):
    pass


class SurjectivityError(TreembedError, ValueError):
    pass


class StructureError(TreembedError, ValueError):
    """Target space is not the metric of the supplied tree."""
