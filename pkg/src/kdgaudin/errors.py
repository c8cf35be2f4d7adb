"""Exception types shared across the package."""


class KDError(Exception):
    """Base class for all errors raised by kdgaudin."""


class LatticeSizeError(KDError, ValueError):
    pass


class DomainError(KDError, ValueError):
    pass


class DegenerateParameterError(KDError, ValueError):
    pass


class NonOrthogonalColumnsError(KDError, ValueError):
    pass


class InvalidKappaError(KDError, ValueError):
    pass


class SingularAnsatzError(KDError, ValueError):
    pass


class NoRealSolutionError(KDError, ArithmeticError):
    """Root finder could not produce d real, distinct, admissible roots."""

    def __init__(self, message, roots=None):
        super().__init__(message)
        self.roots = roots
