"""Exception types raised by miso_lab."""


class MisoLabError(Exception):
    """Base class for all library errors."""


class ContractViolation(MisoLabError, ValueError):
    """An input does not satisfy an operation's precondition."""


class Singular(MisoLabError, ArithmeticError):
    """A linear system has a (numerically) singular coefficient matrix."""


class SingularGram(MisoLabError, ArithmeticError):
    """The denominator form of a generalized eigenproblem is not positive definite."""

    def __init__(self, min_eigenvalue, message=None):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(message or f"Gram matrix numerically singular (min eigenvalue {self.min_eigenvalue:.3e})")


class CayleyPole(MisoLabError, ArithmeticError):
    """1 lies in the spectrum of the operator being Cayley transformed."""


class ClassError(MisoLabError):
    """An operator does not belong to the class it was declared to belong to."""


class DivergentIntegral(MisoLabError, ArithmeticError):
    """A Laplace-type integral diverges for the requested parameter."""


class BoundaryEvaluation(MisoLabError, ValueError):
    """A point is too close to the unit circle for interior evaluation."""


class PoleAtOne(MisoLabError, ArithmeticError):
    """A quantity has a pole at the point 1 of the unit circle."""
