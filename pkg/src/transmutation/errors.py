"""Exception types raised by the numerical modules."""


class TransmutationError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TransmutationError, ValueError):
    """Invalid grid, out-of-range argument or mismatched grids."""


class PreconditionError(TransmutationError, ValueError):
    """An input violates a documented precondition (e.g. support condition)."""


class DegenerateError(TransmutationError, ArithmeticError):
    """Vanishing Wronskian / determinant where a nonzero one is required."""


class TruncationError(TransmutationError, ArithmeticError):
    """An iterative or series computation hit its term budget before tolerance.

    ``tail`` carries the residual estimate at the point of truncation and
    ``partial`` the partially converged result so the caller can decide
    whether it is usable.
    """

    def __init__(self, message, tail=float("nan"), partial=None):
        super().__init__(message)
        self.tail = tail
        self.partial = partial
