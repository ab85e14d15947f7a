"""Exception hierarchy shared by all modules."""


class UmbralError(Exception):
    """Base class for library errors."""


class ModeMismatchError(UmbralError, TypeError):
    """Exact and float scalars were combined."""


class ZeroDivisionFieldError(UmbralError, ZeroDivisionError):
    pass


class DegenerateFunctionalError(UmbralError):
    """A Hankel determinant (or norm) vanished.

    ``index`` is the 1-based Hankel index ``n`` with ``Delta_n == 0``.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NumericallySingularError(DegenerateFunctionalError):
    """Float mode: a pivot fell below tolerance.

    Floating point cannot tell an exact zero from severe ill-conditioning,
    so this is reported separately from a certified (exact) degeneracy.
    """


class RecurrenceBreakdownError(UmbralError):
    """A leading recurrence coefficient vanished."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class InvalidParameterError(UmbralError, ValueError):
    pass


class InconsistentSystemError(UmbralError):
    """An overdetermined linear system has no solution."""


class LatticeCollisionError(InvalidParameterError):
    """A sigma argument landed on (or numerically at) a lattice point."""


class SigmaDomainError(UmbralError):
    """Sigma was asked for an argument outside its validated radius."""
