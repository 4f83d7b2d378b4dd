"""Exception types shared across the toolkit.

The classes map onto the CLI exit codes: schema/row problems are validation
failures (exit 1), configuration/parameter/coverage problems are exit 2, and
an unattainable optimization target is exit 3.
"""

from __future__ import annotations


class TcftlError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(TcftlError):
    """A CSV header is missing required columns or a schema mapping is malformed."""


class RowError(TcftlError):
    """A data row violates a sample invariant (fatal only in strict mode)."""


class EstimationError(TcftlError):
    """Not enough data to estimate the requested quantity."""


class ConfigurationError(TcftlError):
    """A configuration table or object is incomplete or inconsistent."""


class ParameterError(TcftlError):
    """A parameter value is outside its documented range."""


class CoverageError(TcftlError):
    """The PDF bank does not cover the requested cell or range interval."""


class InfeasibleError(TcftlError):
    """No operating point attains the requested performance target.

    Attributes:
        best: The best achievable value of the targeted quantity, when known.
    """

    def __init__(self, message: str, best: float | None = None):
        super().__init__(message)
        self.best = best
