"""Exception types raised by spinbrach."""


class SpinBrachError(Exception):
    """Base class for all package errors."""


class NormalizationError(SpinBrachError, ValueError):
    """A state vector is not normalized within the input tolerance."""


class DomainError(SpinBrachError, ValueError):
    """An argument lies outside the domain of an operation."""


class NoSolutionError(SpinBrachError, ValueError):
    """A closed-form arrival time has no real solution for the given angle."""


class DegenerateSpanError(SpinBrachError, ValueError):
    """Initial and final states are parallel; their span is one-dimensional."""


class CapabilityError(SpinBrachError, NotImplementedError):
    """The requested configuration is not supported by the analysis."""


class DiagonalizationError(SpinBrachError, ArithmeticError):
    """Numerical eigendecomposition failed."""


class UnreachableBySearchError(SpinBrachError, RuntimeError):
    """No grid node reaches the target within the search horizon.

    Parameters
    ----------
    best_infidelity : float
        Smallest infidelity reached anywhere on the search grid.
    """

    def __init__(self, message: str, best_infidelity: float):
        super().__init__(message)
        self.best_infidelity = best_infidelity
