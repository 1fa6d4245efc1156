"""Exception types shared by every divflux module."""


class DivfluxError(Exception):
    """Base class for all library errors."""


class ShapeError(DivfluxError):
    """Operand shapes do not conform."""


class DomainError(DivfluxError):
    """A value lies outside the mathematical domain of the operation.

    Carries ``index`` (flat position of the first offending entry) when the
    violation is data-dependent, so callers can report it.
    """

    def __init__(self, message: str, index: int | None = None):
        if index is not None:
            message = f"{message} (offending index {index})"
        super().__init__(message)
        self.index = index


class ParamError(DivfluxError):
    """A parameter is missing, unknown, or outside its admissible range."""


class StallError(DivfluxError):
    """A line search or update step could not make progress."""


class ConstraintError(DivfluxError):
    """An iterate violates a constraint it was required to satisfy."""


class InvariantError(DivfluxError):
    """An operation required a scale-invariant divergence and got none."""


class DecompositionError(DivfluxError):
    """A U/V gradient decomposition is invalid (nonpositive component)."""


class NoClosedForm(DivfluxError):
    """No closed-form nominal invariance factor exists for this family."""


class NotDecomposable(DivfluxError):
    """The invariant form does not split into two positive terms."""
