"""Exception hierarchy.

Every error raised on purpose derives from :class:`UnicoverError`. The
subclasses are grouped by the exit code the CLI maps them to:
precondition failures (2), lattice obstructions (3) and parse errors (4).
"""


class UnicoverError(Exception):
    exit_code = 2
    reason = "error"


class PreconditionError(UnicoverError, ValueError):
    reason = "precondition"


class AlgebraMismatch(PreconditionError):
    reason = "algebra-mismatch"


class InvalidElement(PreconditionError):
    """An element failed the unitary, Hermitian or projection check."""

    reason = "invalid-element"


class BranchFailure(PreconditionError):
    """An eigenvalue sits too close to -1 for a principal logarithm."""

    reason = "branch-failure"


class GapTooLarge(PreconditionError):
    reason = "gap-too-large"

    def __init__(self, index: int, gap: float, bound: float):
        self.index = index
        self.gap = gap
        self.bound = bound
        super().__init__(
            f"sample gap {gap:.6g} at index {index} exceeds {bound:.6g}; resample more finely"
        )


class NotALoop(PreconditionError):
    reason = "not-a-loop"


class EndpointMismatch(PreconditionError):
    reason = "endpoint-mismatch"


class RefinementExceeded(PreconditionError):
    reason = "refinement-exceeded"


class NotInvertible(PreconditionError):
    reason = "not-invertible"


class RetractionInvalid(PreconditionError):
    reason = "retraction-invalid"


class NotExact(PreconditionError):
    reason = "not-exact"


class InvalidGroup(PreconditionError):
    reason = "invalid-group"


class LatticeObstruction(UnicoverError):
    """A value is off the trace lattice of a finite-dimensional algebra."""

    exit_code = 3
    reason = "lattice-obstruction"


class NotInLattice(LatticeObstruction):
    reason = "not-in-lattice"


class UnreachableTrace(LatticeObstruction):
    reason = "unreachable-trace"


class ParseError(UnicoverError):
    exit_code = 4
    reason = "parse-error"

    def __init__(self, message: str, where: str = "$", source: str | None = None):
        self.where = where
        self.source = source
        prefix = f"{source}: " if source else ""
        super().__init__(f"{prefix}{where}: {message}")
