"""
Dense complex matrices and the eigenvalue statistics that can be read off
their traces without computing a single eigenvalue.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Literal, Optional, Sequence, Union

import numpy as np

from tracebound.errors import MatrixValidationError, ModeError, ParameterError, ShapeError

if TYPE_CHECKING:
    from tracebound.spectral_oracle import Spectrum

logger = logging.getLogger(__name__)

SLambdaMode = Literal["oracle", "normal_formula", "upper_bound"]

DEFAULT_NORMAL_TOL = 1e-10
DEFAULT_HERMITIAN_TOL = 1e-12
MAX_ORDER = 512


@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    """Immutable n x n complex matrix; `entries` is a read-only complex128 array."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            rows = arr.shape[0] if arr.ndim >= 1 else 0
            cols = arr.shape[1] if arr.ndim >= 2 else 0
            raise ShapeError(rows, cols)
        if arr.shape[0] == 0:
            raise ShapeError(0, 0, "matrix must have order at least 1")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise MatrixValidationError(f"non-finite entry at row {bad[0] + 1}, column {bad[1] + 1}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[complex]]) -> "ComplexMatrix":
        return cls(np.array(rows, dtype=np.complex128))

    @classmethod
    def identity(cls, n: int) -> "ComplexMatrix":
        return cls(np.eye(n, dtype=np.complex128))

    @classmethod
    def diagonal(cls, values: Iterable[complex]) -> "ComplexMatrix":
        return cls(np.diag(np.array(list(values), dtype=np.complex128)))

    @property
    def order(self) -> int:
        return int(self.entries.shape[0])

    def power(self, p: int) -> "ComplexMatrix":
        """A^p by repeated multiplication."""
        if p < 1:
            raise ParameterError(f"power must be a positive integer, got {p}")
        result = self.entries
        for _ in range(p - 1):
            result = result @ self.entries
        return ComplexMatrix(result)

    def __sub__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        return ComplexMatrix(self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "ComplexMatrix":
        return ComplexMatrix(self.entries * complex(scalar))

    __rmul__ = __mul__


def trace(a: ComplexMatrix) -> complex:
    return complex(np.trace(a.entries))


def matrix_power_trace(a: ComplexMatrix, p: int) -> complex:
    """tr(A^p), computed from the matrix power rather than from eigenvalues."""
    return trace(a.power(p))


def frobenius_norm_sq(a: ComplexMatrix) -> float:
    """sum |a_ij|^2 = tr(AA*)."""
    return float(np.sum(np.abs(a.entries) ** 2))


def _commutator_norm_sq(a: ComplexMatrix) -> float:
    m = a.entries
    mh = m.conj().T
    return float(np.sum(np.abs(m @ mh - mh @ m) ** 2))


def is_hermitian(a: ComplexMatrix, tol: float = DEFAULT_HERMITIAN_TOL) -> bool:
    scale = max(math.sqrt(frobenius_norm_sq(a)), 1.0)
    return bool(np.max(np.abs(a.entries - a.entries.conj().T)) <= tol * scale)


def is_normal(a: ComplexMatrix, tol: float = DEFAULT_NORMAL_TOL) -> bool:
    """||AA* - A*A||_F <= tol * ||A||_F^2."""
    fro_sq = frobenius_norm_sq(a)
    if fro_sq == 0.0:
        return True
    return math.sqrt(_commutator_norm_sq(a)) <= tol * fro_sq


@dataclass(frozen=True, eq=False)
class CenteredMatrix:
    """
    B = A - shift * I with shift = trA / m.

    m is the effective dimension; with a rank override m < n the remaining
    n - m eigenvalues of A are zeros and are left out of every statistic.
    """

    base: ComplexMatrix
    shift: complex
    matrix: ComplexMatrix
    effective_dim: int

    @property
    def order(self) -> int:
        return self.base.order

    @property
    def excluded(self) -> int:
        return self.order - self.effective_dim

    def effective_power_trace(self, p: int) -> complex:
        """sum over the effective eigenvalues of (lambda - shift)^p."""
        total = matrix_power_trace(self.matrix, p)
        if self.excluded:
            total -= self.excluded * (-self.shift) ** p
        return total


def _effective_dim(n: int, rank_override: Optional[int]) -> int:
    if rank_override is None:
        return n
    m = int(rank_override)
    if not 1 <= m <= n:
        raise ParameterError(f"rank override must lie in 1..{n}, got {rank_override}")
    return m


def centered(a: ComplexMatrix, rank_override: Optional[int] = None) -> CenteredMatrix:
    m = _effective_dim(a.order, rank_override)
    shift = trace(a) / m
    b = a - ComplexMatrix.identity(a.order) * shift
    return CenteredMatrix(base=a, shift=shift, matrix=b, effective_dim=m)


def moment_upper_bound(b: CenteredMatrix, r: int) -> float:
    """
    Upper bound on sum |lambda_i(B)|^(2r) from traces and Frobenius norms:

        sqrt((||B^r||^2 - |tr B^r|^2/n)^2 - 1/2 ||B^r B^r* - B^r* B^r||^2) + |tr B^r|^2/n

    with ||.|| the Frobenius norm. A negative radicand (rounding on near-normal
    input) is clamped to zero. Under a rank override the exact contribution of
    the excluded zero eigenvalues, |shift|^(2r) each, is subtracted.
    """
    if r < 1:
        raise ParameterError(f"r must be a positive integer, got {r}")
    n = b.order
    br = b.matrix.power(r)
    fro = frobenius_norm_sq(br)
    tr_term = abs(trace(br)) ** 2 / n
    radicand = (fro - tr_term) ** 2 - 0.5 * _commutator_norm_sq(br)
    if radicand < 0.0:
        logger.debug("clamping negative radicand %.3e in moment bound (r=%d)", radicand, r)
        radicand = 0.0
    bound = math.sqrt(radicand) + tr_term
    if b.excluded:
        bound -= b.excluded * abs(b.shift) ** (2 * r)
    return max(bound, 0.0)


@dataclass(frozen=True)
class SpectralStats:
    """Eigenvalue statistics derived from traces (plus S_lambda^2 from the chosen source)."""

    n: int
    trace: complex
    trace_sq: complex
    mean: complex
    complex_variance: complex
    abs_variance: float
    abs_variance_source: SLambdaMode
    real_part_variance: float
    imag_part_variance: float
    effective_dim: int
    real_spectrum: bool


def spectral_stats(
    a: ComplexMatrix,
    s_lambda_mode: SLambdaMode,
    rank_override: Optional[int] = None,
    spectrum: Optional[Union[Spectrum, Sequence[complex], np.ndarray]] = None,
    real_spectrum: Optional[bool] = None,
    normal_tol: float = DEFAULT_NORMAL_TOL,
    hermitian_tol: float = DEFAULT_HERMITIAN_TOL,
) -> SpectralStats:
    """
    Fill SpectralStats for `a`.

    Parameters
    ----------
    a : ComplexMatrix
        The matrix.
    s_lambda_mode : {"oracle", "normal_formula", "upper_bound"}
        Where S_lambda^2 comes from: supplied eigenvalues, trAA*/m - |trA/m|^2
        (normal matrices only), or the moment upper bound at r=1.
    rank_override : int, optional
        Effective dimension m replacing n in every statistic.
    spectrum : Spectrum or sequence of complex, optional
        Eigenvalues of `a` (an eigensolver result or the bare values), required
        for oracle mode.
    real_spectrum : bool, optional
        Caller assertion that every eigenvalue is real. Hermitian input is
        accepted automatically.
    """
    n = a.order
    m = _effective_dim(n, rank_override)
    tr = trace(a)
    tr_sq = matrix_power_trace(a, 2)
    mean = tr / m
    s2 = tr_sq / m - mean * mean

    if s_lambda_mode == "oracle":
        if spectrum is None:
            raise ModeError("oracle mode needs the eigenvalues of the matrix")
        lam = np.asarray(getattr(spectrum, "eigenvalues", spectrum), dtype=complex).reshape(-1)
        if lam.size != n:
            raise ParameterError(f"expected {n} eigenvalues, got {lam.size}")
        total = float(np.sum(np.abs(lam - mean) ** 2)) - (n - m) * abs(mean) ** 2
        s_lambda = total / m
    elif s_lambda_mode == "normal_formula":
        if not is_normal(a, normal_tol):
            raise ModeError("the normal-matrix formula for S_lambda^2 needs a normal matrix")
        s_lambda = frobenius_norm_sq(a) / m - abs(mean) ** 2
    elif s_lambda_mode == "upper_bound":
        s_lambda = moment_upper_bound(centered(a, rank_override), 1) / m
    else:
        raise ModeError(f"unknown S_lambda^2 mode {s_lambda_mode!r}")

    s_lambda = max(s_lambda, 0.0)
    hermitian = is_hermitian(a, hermitian_tol)
    return SpectralStats(
        n=n,
        trace=tr,
        trace_sq=tr_sq,
        mean=mean,
        complex_variance=s2,
        abs_variance=s_lambda,
        abs_variance_source=s_lambda_mode,
        real_part_variance=max((s_lambda + s2.real) / 2.0, 0.0),
        imag_part_variance=max((s_lambda - s2.real) / 2.0, 0.0),
        effective_dim=m,
        real_spectrum=bool(real_spectrum) or hermitian,
    )
