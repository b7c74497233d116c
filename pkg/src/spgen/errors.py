"""Exception types shared across the package."""


class SpgenError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(SpgenError, ValueError):
    """An argument violates a documented precondition."""


class FactorizationError(SpgenError):
    """Cholesky factorization failed: the matrix is not positive definite.

    ``pivot_index`` is the zero-based index of the first failing pivot.
    """

    def __init__(self, pivot_index: int, message: str | None = None):
        self.pivot_index = pivot_index
        if message is None:
            message = f"matrix is not positive definite (pivot {pivot_index})"
        super().__init__(message)


class EmbeddingInfeasibleError(SpgenError):
    """No nonnegative definite circulant embedding at the requested size.

    ``min_eigenvalue`` is the most negative eigenvalue encountered.
    """

    def __init__(self, min_eigenvalue: float, message: str | None = None):
        self.min_eigenvalue = min_eigenvalue
        if message is None:
            message = (
                "could not find a nonnegative definite embedding "
                f"(minimum eigenvalue {min_eigenvalue:.6e})"
            )
        super().__init__(message)


class IntensityBoundError(SpgenError):
    """An intensity function exceeded its declared upper bound."""


class SupercriticalBranchingError(SpgenError):
    """Branching ratio >= 1: the cluster cascade would not terminate."""


class GenerationCapError(SpgenError):
    """A generator exceeded its hard cap on produced points."""


class InvalidMeasureError(SpgenError):
    """A jump measure fails the required integrability condition."""
