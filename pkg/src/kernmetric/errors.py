"""Exception hierarchy shared across the package."""


class KernmetricError(ValueError):
    """Base class for all validation failures raised by this package."""


class DomainError(KernmetricError):
    """An argument is outside the mathematical domain of an operation."""


class ShapeError(KernmetricError):
    """Two objects live on incompatible spaces or grids."""


class ProfileClassError(KernmetricError):
    """A radial profile is not strictly positive definite where required."""


class InjectivityError(KernmetricError):
    """A map fails the numerical injectivity check."""


class DegeneracyError(KernmetricError):
    """A base kernel fails the non-degeneracy (strict quadratic form) check."""
