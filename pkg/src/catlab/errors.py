"""Exception hierarchy shared by all catlab modules."""


class CatlabError(Exception):
    """Base class for every error raised by catlab."""


class DomainError(CatlabError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(CatlabError, ValueError):
    """A fixture, grid or run configuration is unusable."""


class PreconditionError(CatlabError, ValueError):
    """A stated hypothesis of a check does not hold for the given input."""


class OutOfRegimeError(DomainError):
    """Parameters are valid but outside the regime a bound is stated for."""


class UnsupportedFixtureError(ConfigurationError):
    """The operation is not defined for this kind of fixture."""


class AccuracyError(CatlabError, ArithmeticError):
    """Adaptive quadrature failed to meet its tolerance.

    Attributes:
        estimate: best available value of the integral.
        error: estimated absolute error of ``estimate``.
    """

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DivergenceError(CatlabError, ArithmeticError):
    """An improper integral or limit does not converge."""


class BracketError(CatlabError, ValueError):
    """Root finding was given an interval without a sign change."""


class IntegrationError(CatlabError, ArithmeticError):
    """ODE integration could not proceed (step underflow, non-finite state)."""


class GeometryError(CatlabError, ArithmeticError):
    """A geometric construction (e.g. a normal-line intersection) failed."""


class BoundViolation(CatlabError, AssertionError):
    """A computed quantity violates an inequality the construction asserts.

    Attributes:
        value: the computed quantity.
        bound: the bound it was compared against.
    """

    def __init__(self, message, value=None, bound=None):
        super().__init__(message)
        self.value = value
        self.bound = bound
