"""Numerical checks for catenoid necks, ellipsoidal sphere metrics and
two-sheet monotonicity quantities of nearly doubled minimal hypersurfaces."""

from catlab.errors import (
    AccuracyError,
    BoundViolation,
    BracketError,
    CatlabError,
    ConfigurationError,
    DivergenceError,
    DomainError,
    GeometryError,
    IntegrationError,
    OutOfRegimeError,
    PreconditionError,
    UnsupportedFixtureError,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "BoundViolation",
    "BracketError",
    "CatlabError",
    "ConfigurationError",
    "DivergenceError",
    "DomainError",
    "GeometryError",
    "IntegrationError",
    "OutOfRegimeError",
    "PreconditionError",
    "UnsupportedFixtureError",
]
