"""Exception types shared across the package."""


class HetnetError(Exception):
    """Base class for all package-specific errors."""


class GraphFormatError(HetnetError):
    """Raised when an edge-list document cannot be parsed.

    Carries the offending line number when one is known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SimplexAdmissibilityError(HetnetError):
    """Graph violates the no 1-/2-cycle requirements of the simplex construction."""


class NotTwoCyclesError(HetnetError):
    """Graph does not consist of exactly two directed cycles."""


class NonContiguousSharedEdgesError(HetnetError):
    """Common edges of the two cycles do not form one contiguous path (defensive)."""


class InvalidShapeError(HetnetError):
    """(k, l, m) parameters do not describe a valid two-cycle graph."""


class TwoCycleCreatedError(HetnetError):
    """An edge addition would create a 2-cycle (defensive)."""


class BudgetExceededError(HetnetError):
    """Exhaustive search hit its work budget before finishing."""


class SpecMismatchError(HetnetError):
    """Eigenvalue specification does not match the graph structure."""


class SignError(HetnetError):
    """An eigenvalue magnitude or default has the wrong sign."""


class MisclassifiedSignError(HetnetError):
    """A contracting/expanding eigenvalue has the wrong sign for its role."""


class DimensionMismatchError(HetnetError):
    """Matrix or table dimensions are inconsistent."""


class ConvergenceFailureError(HetnetError):
    """Iterative eigenvalue computation did not converge."""


class ShapeMismatchError(HetnetError):
    """Eigenvalue table does not have the sign pattern required by a reduction."""


class StepUnderflowError(HetnetError):
    """Adaptive integrator step size shrank below the representable minimum."""


class NonFiniteError(HetnetError):
    """Integration produced a non-finite state."""


class DivergedError(HetnetError):
    """Trajectory left the region where the verification is meaningful."""
