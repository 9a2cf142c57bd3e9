"""Exception hierarchy shared across the package."""


class HopfLyapError(Exception):
    """Base class for all package errors."""


class DomainError(HopfLyapError, ValueError):
    """Input outside the region where an operation is defined."""


class SingularMatrixError(HopfLyapError, ArithmeticError):
    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class RankStructureError(HopfLyapError, ArithmeticError):
    """A matrix expected to have a one-dimensional kernel does not."""


class ConvergenceError(HopfLyapError, ArithmeticError):
    def __init__(self, message, last=None, residual=None):
        super().__init__(message)
        self.last = last
        self.residual = residual


class ConsistencyError(HopfLyapError):
    """Two independent evaluation routes of the same quantity disagree."""


class IntegrationError(HopfLyapError):
    def __init__(self, message, t_reached=None):
        super().__init__(message)
        self.t_reached = t_reached


class InsufficientDataError(HopfLyapError, ValueError):
    pass
