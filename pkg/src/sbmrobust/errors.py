"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class DegenerateSpectrumError(RuntimeError):
    """Raised when a Laplacian has fewer nonzero eigenvalues than requested."""


class InfeasibleError(RuntimeError):
    """Raised when no state satisfying the size/connectivity constraints exists."""


class StuckNeighborhoodError(RuntimeError):
    """Raised when no connected swap could be found after the retry budget."""
