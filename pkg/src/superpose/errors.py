"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested quantity."""


class ResourceError(RuntimeError):
    """A computation would exceed a configured size cap."""


class FeasibilityError(DomainError):
    """A matrix assembled for a given lambda is not positive definite."""
