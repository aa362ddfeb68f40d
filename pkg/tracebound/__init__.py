"""Trace-based eigenvalue localisation bounds for dense complex matrices."""

__version__ = "0.1.0"

from tracebound.errors import TraceboundError  # noqa: E402
from tracebound.matrix_core import ComplexMatrix, spectral_stats  # noqa: E402

__all__ = ["ComplexMatrix", "TraceboundError", "__version__", "spectral_stats"]
