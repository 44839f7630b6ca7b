"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: validation/parse failures -> 2,
precondition failures -> 3, dimension mismatches -> 4, resource guards -> 5.
"""


class SwapSteerError(Exception):
    """Base class for all package errors."""


class ValidationError(SwapSteerError):
    """An object (state file, matrix, table) failed an invariant check."""

    def __init__(self, check: str, magnitude: float | None = None, detail: str = ""):
        self.check = check
        self.magnitude = magnitude
        msg = f"validation failed: {check}"
        if magnitude is not None:
            msg += f" (magnitude {magnitude:.3e})"
        if detail:
            msg += f" - {detail}"
        super().__init__(msg)


class PreconditionError(SwapSteerError):
    """Inputs are well-formed but violate an operation's precondition."""


class DimensionMismatchError(SwapSteerError):
    """Operands have incompatible shapes or subsystem dimensions."""


class ResourceGuardError(SwapSteerError):
    """A brute-force routine was asked for more than its cost guard allows."""


class ConvergenceError(SwapSteerError):
    """An iterative kernel failed to converge within its iteration cap."""
