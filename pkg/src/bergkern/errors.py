"""Exception hierarchy shared by every bergkern module."""


class BergkernError(Exception):
    """Base class for all library errors."""


class DomainError(BergkernError, ValueError):
    """An argument lies outside the region where an operation is defined."""


class PoleError(BergkernError, ZeroDivisionError):
    """Evaluation hit a pole of a rational function or a series parameter."""


class ConvergenceError(BergkernError, RuntimeError):
    """A truncated series did not meet its tail tolerance within max_terms."""


class SingularArgument(BergkernError, ValueError):
    """A representation is undefined at the requested (removable or not) point."""


class NumericalError(BergkernError, ArithmeticError):
    """A floating-point result failed an internal consistency check."""
