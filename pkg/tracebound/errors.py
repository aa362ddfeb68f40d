from __future__ import annotations

from typing import Optional, Sequence


class TraceboundError(Exception):
    """Base class for every error raised by tracebound."""


class DegenerateSizeError(TraceboundError):
    """Raised when a sequence or matrix is too small for the requested bound."""


class IndexRangeError(TraceboundError, IndexError):
    """Raised when a 1-based position (j, l, k) is outside its allowed range."""


class PreconditionError(TraceboundError):
    """Raised when an input violates a checked precondition (e.g. unsorted data)."""


class ParameterError(TraceboundError, ValueError):
    """Raised for out-of-range numeric parameters (k, r, weights, moments)."""


class ModeError(TraceboundError):
    """Raised when a gated computation is requested on an input that fails the gate."""


class ConsistencyError(TraceboundError):
    """Raised when trace-derived inputs contradict each other."""


class ConfigError(TraceboundError):
    """Raised for malformed configuration files or values."""


class ShapeError(TraceboundError):
    def __init__(self, rows: int, cols: int, message: Optional[str] = None) -> None:
        self.rows = rows
        self.cols = cols
        super().__init__(message or f"matrix must be square, got {rows} rows x {cols} columns")


class MatrixParseError(TraceboundError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None) -> None:
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{where}")


class MatrixValidationError(TraceboundError):
    """Raised when matrix entries are not finite."""


class ConvergenceError(TraceboundError):
    """
    Raised when the QR iteration exhausts its sweep budget.

    `partial` holds the eigenvalues that had deflated before the budget ran out.
    """

    def __init__(self, message: str, partial: Sequence[complex] = (), sweeps: int = 0) -> None:
        self.partial = tuple(partial)
        self.sweeps = sweeps
        super().__init__(message)
