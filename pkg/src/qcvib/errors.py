"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration/validation problems
exit with 2, numerical failures with 3.
"""


class QcvibError(Exception):
    """Base class for all package errors."""


class ValidationError(QcvibError, ValueError):
    """Invalid argument or violated precondition."""


class ParseError(ValidationError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, path: str = "", line: int = 0):
        self.path = path
        self.line = line
        if path or line:
            message = f"{path}:{line}: {message}"
        super().__init__(message)


class OutOfRangeError(ValidationError):
    """Coordinate outside the tabulated domain (no extrapolation)."""


class ConfigError(ValidationError):
    """Bad run configuration or command-line usage."""


class NumericalError(QcvibError, RuntimeError):
    """Base class for failures of the numerical machinery."""


class SolverError(NumericalError):
    """Eigensolver failed to bracket or converge."""


class GeometryError(NumericalError):
    """Root finding on a potential curve failed (no bracket)."""


class UnboundStateError(NumericalError):
    """A trajectory expected to stay bound dissociated."""


class IntegratorError(NumericalError):
    """Trajectory integration left the valid domain."""
