"""Random test matrices, reproducible from (seed, trial)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from tracebound.errors import ParameterError
from tracebound.matrix_core import ComplexMatrix

KINDS = ("hermitian", "normal", "ginibre", "jordan_defective", "diagonal")
REAL_SPECTRUM_KINDS = ("hermitian", "jordan_defective", "diagonal")
MAX_JORDAN_BLOCK = 3


@dataclass(frozen=True)
class EnsembleSpec:
    """
    One family of random matrices.

    `values` fixes the diagonal of a `diagonal` spec (n must then equal its
    length); without it the diagonal is drawn at random.
    """

    kind: str
    n: int
    seed: int
    scale: float = 1.0
    values: Optional[Tuple[complex, ...]] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ParameterError(f"unknown ensemble kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.n < 2:
            raise ParameterError(f"ensemble order must be at least 2, got {self.n}")
        if self.seed < 0:
            raise ParameterError(f"seed must be non-negative, got {self.seed}")
        if self.scale <= 0:
            raise ParameterError(f"scale must be positive, got {self.scale}")
        if self.values is not None:
            if self.kind != "diagonal":
                raise ParameterError("explicit values are only accepted for the diagonal ensemble")
            object.__setattr__(self, "values", tuple(complex(v) for v in self.values))
            if len(self.values) != self.n:
                raise ParameterError(f"got {len(self.values)} values for n={self.n}")

    @property
    def real_spectrum(self) -> bool:
        if self.kind == "diagonal" and self.values is not None:
            return all(v.imag == 0 for v in self.values)
        return self.kind in REAL_SPECTRUM_KINDS

    @property
    def max_block(self) -> int:
        """Largest Jordan block the family can produce."""
        return min(MAX_JORDAN_BLOCK, self.n) if self.kind == "jordan_defective" else 1

    def label(self) -> str:
        return f"{self.kind}(n={self.n}, seed={self.seed})"


def _complex_gaussian(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian matrix with the phases of diag(R) folded into Q."""
    q, r = np.linalg.qr(_complex_gaussian(rng, (n, n)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diagonal(r))


def _jordan_form(rng: np.random.Generator, n: int, scale: float) -> np.ndarray:
    """Direct sum of Jordan blocks of size <= 3 with real eigenvalues; the first block has size >= 2."""
    sizes = [min(int(rng.integers(2, MAX_JORDAN_BLOCK + 1)), n)]
    while sum(sizes) < n:
        sizes.append(min(int(rng.integers(1, MAX_JORDAN_BLOCK + 1)), n - sum(sizes)))
    j = np.zeros((n, n), dtype=complex)
    start = 0
    for size in sizes:
        lam = scale * rng.standard_normal()
        for i in range(start, start + size):
            j[i, i] = lam
            if i + 1 < start + size:
                j[i, i + 1] = 1.0
        start += size
    return j


def generate(spec: EnsembleSpec, trial: int = 0) -> ComplexMatrix:
    """
    Draw matrix number `trial` of the family.

    hermitian: (G + G*)/2; normal: U diag(z) U* with Haar U; ginibre: complex
    Gaussian entries of unit variance; jordan_defective: Jordan blocks
    conjugated by S = U diag(d) V (U, V orthogonal, d in [1, 2], so cond(S) <= 2);
    diagonal: the given values or a random real diagonal.
    """
    if trial < 0:
        raise ParameterError(f"trial must be non-negative, got {trial}")
    rng = np.random.default_rng([spec.seed, trial])
    n = spec.n

    if spec.kind == "hermitian":
        g = _complex_gaussian(rng, (n, n))
        entries = spec.scale * (g + g.conj().T) / 2.0
    elif spec.kind == "normal":
        u = haar_unitary(rng, n)
        z = spec.scale * _complex_gaussian(rng, (n,))
        entries = (u * z) @ u.conj().T
    elif spec.kind == "ginibre":
        entries = spec.scale * _complex_gaussian(rng, (n, n))
    elif spec.kind == "jordan_defective":
        jordan = _jordan_form(rng, n, spec.scale)
        u = haar_orthogonal(rng, n)
        v = haar_orthogonal(rng, n)
        d = rng.uniform(1.0, 2.0, size=n)
        s = (u * d) @ v
        s_inv = v.T @ (u.T / d[:, None])
        entries = s @ jordan @ s_inv
    else:
        if spec.values is not None:
            diag = np.array(spec.values, dtype=complex)
        else:
            diag = spec.scale * rng.standard_normal(n).astype(complex)
        entries = np.diag(diag)
    return ComplexMatrix(entries)
