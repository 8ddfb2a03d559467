"""Exception hierarchy shared across the toolkit.

Every parser and numeric operation either returns a fully valid value or
raises one of these; callers never see partially-built objects.
"""


class TensekitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(TensekitError, ValueError):
    """Numeric input outside an operation's domain (e.g. f <= 0 Hz)."""


class ParseError(TensekitError, ValueError):
    """Malformed input file. Carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FitError(TensekitError):
    """Polynomial fit impossible (too few points, rank-deficient system)."""


class IndicatorError(TensekitError):
    """A tenseness indicator could not be computed (missing landmark data)."""


class SimulationError(TensekitError):
    """Forward simulation produced an invalid state; message names the time."""


class DataError(TensekitError):
    """Statistical routine given degenerate or insufficient data."""


class ConfigError(TensekitError):
    """Invalid configuration or unusable parameter combination."""
