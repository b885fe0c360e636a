"""Exception types raised across the package."""


class InvalidSizeError(ValueError):
    """A size parameter (n, k, depth, mode index) is out of range."""


class SizeMismatchError(ValueError):
    """Operands of a matrix operation are not conformable."""


class NotPSDError(ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class UnsupportedParameterError(ValueError):
    pass


class EliminationSingularityError(ArithmeticError):
    pass


class NonConvergenceError(RuntimeError):
    """Iteration budget exhausted before the step size dropped below tolerance.

    The last iterate and its step residual are kept on the exception so a
    caller can still report how far the iteration got.
    """

    def __init__(self, message, residual, iterations, last=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.last = last


class PoleEncounteredError(ZeroDivisionError):
    def __init__(self, message, floor):
        super().__init__(message)
        self.floor = floor


class DegenerateFractionError(ValueError):
    pass


class RecoverySingularError(ArithmeticError):
    pass


class ExpansionFailureError(ArithmeticError):
    pass
