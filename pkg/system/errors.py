"""
Error taxonomy shared by every package of the laboratory.

The command line maps each family to its exit status, see ``exit_code``.
"""


class PlateLabError(Exception):
    """Base class for all laboratory failures."""


class InvalidParametersError(PlateLabError, ValueError):
    """A parameter record or run configuration violates its invariants."""


class ChartError(InvalidParametersError):
    """A radius profile is not positive or exceeds the Fourier limit."""

    def __init__(self, message: str, theta: float = None):
        super().__init__(message)
        self.theta = theta


class BasisConstraintError(InvalidParametersError):
    """The basis does not honour the essential conditions of the problem."""


class SolverError(PlateLabError, RuntimeError):
    """A numerical procedure could not deliver its result."""


class NotPositiveDefiniteError(SolverError):
    """Cholesky factorization broke down."""

    def __init__(self, pivot: int):
        super().__init__(f"Matrix is not positive definite: pivot {pivot} is not positive")
        self.pivot = pivot


class ConvergenceError(SolverError):
    """An iterative method stopped before reaching its tolerance."""


class NonFiniteValueError(SolverError):
    """A function evaluated to NaN or infinity."""


class TruncationError(SolverError):
    """The requested number of eigenvalues is not reachable with the given limits."""


class DegenerateDeterminantError(SolverError):
    """A Steklov denominator determinant vanished."""


class ClusterTrackingError(SolverError):
    """A cluster could not be re-identified on a perturbed domain."""


class PartialClusterError(InvalidParametersError):
    """A computation that needs the whole eigenspace received a subset of it."""


class VerificationError(PlateLabError):
    """A verification quantity breached its threshold."""


EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_VERIFICATION = 4


def exit_code(error: BaseException) -> int:
    """Map an exception to the command-line exit status.

    Args:
        error: The exception raised by a command

    Returns:
        The exit status for that family of failures
    """
    # pydantic is imported lazily so that this module stays dependency free
    from pydantic import ValidationError

    if isinstance(error, VerificationError):
        return EXIT_VERIFICATION
    if isinstance(error, (InvalidParametersError, ValidationError)):
        return EXIT_INVALID
    return EXIT_SOLVER
