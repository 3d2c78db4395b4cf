"""Exception hierarchy shared by every semilab module."""


class SemilabError(Exception):
    """Base class for all semilab errors."""


class MalformedVectorError(SemilabError, ValueError):
    """A vector does not fit its ambient space."""


class SpaceMismatchError(SemilabError, ValueError):
    """Operands live in different ambient spaces."""


class DegenerateBasisError(SemilabError, ValueError):
    """A subspace basis failed the linear-independence test."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class UnsupportedDimensionError(SemilabError, ValueError):
    """Operation requested for a subspace dimension it does not handle."""


class DomainError(SemilabError, ValueError):
    """Time argument outside the scenario's time domain."""


class UnsupportedScenarioError(SemilabError, ValueError):
    """Scenario lacks the structure a diagnostic needs."""


class NumericalFailure(SemilabError, ArithmeticError):
    """Base class for solver and quadrature breakdowns."""


class SolverFailure(NumericalFailure):
    """The minimax solver did not converge.

    ``best`` holds the best objective value reached before giving up.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class QuadratureFailure(NumericalFailure):
    """A quadrature rule could not reach its error tolerance."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
