"""Exception types shared across the package."""


class SolwaveError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SolwaveError, ValueError):
    """Input outside the validity range of a closed-form family."""


class SingularityError(SolwaveError, ValueError):
    """Derivative requested at a point where it does not exist."""


class NoSolitonError(SolwaveError):
    """No localized profile exists for the requested frequency."""


class NumericsError(SolwaveError):
    """An iterative or linear solve failed to reach its tolerance."""


class ArgumentError(SolwaveError, ValueError):
    """Inconsistent or missing arguments."""


class PreconditionError(SolwaveError):
    """A documented operation precondition was violated by the caller."""


class SingularOperatorError(SolwaveError):
    """Green-function construction hit a (near-)kernel of the operator."""


class DependencyError(SolwaveError):
    """An operator was requested before its profile data was built."""


class GridError(SolwaveError, ValueError):
    """Grid incompatible with the requested construction."""


class DecompositionError(SolwaveError):
    """Newton iteration for the modulation parameters did not converge."""
