"""
Reference eigensolver and claim verifiers.

`eigenvalues` reduces A to Hessenberg form with Householder reflectors and runs
explicitly shifted complex QR sweeps (Givens rotations, Wilkinson shift,
exceptional shift after 10 stalled sweeps). `charpoly_eigenvalues` is an
independent root finder for small matrices, used to certify the first one.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from tracebound.eigen_bounds import AxisStrip, Disk, ExtremalBounds, Region, SpreadBound
from tracebound.errors import ConvergenceError, ParameterError
from tracebound.matrix_core import MAX_ORDER, ComplexMatrix, frobenius_norm_sq, trace

logger = logging.getLogger(__name__)

DEFAULT_EIG_TOL = 1e-12
DEFAULT_SWEEPS_PER_ORDER = 100
CHARPOLY_MAX_ORDER = 8
EXCEPTIONAL_EVERY = 10

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues with multiplicity, the Schur residual ||AQ - QT||_F / ||A||_F and the sweeps used."""

    eigenvalues: np.ndarray
    residual: float
    sweeps: int

    @property
    def n(self) -> int:
        return int(self.eigenvalues.size)

    def sorted_values(self) -> np.ndarray:
        """Eigenvalues ordered by real part, then imaginary part."""
        lam = self.eigenvalues
        return lam[np.lexsort((lam.imag, lam.real))]


SpectrumLike = Union[Spectrum, Sequence[complex], np.ndarray]


def _values(spectrum: SpectrumLike) -> np.ndarray:
    if isinstance(spectrum, Spectrum):
        return spectrum.eigenvalues
    return np.asarray(spectrum, dtype=complex).reshape(-1)


def _hessenberg(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Householder reduction A = Q H Q* with H upper Hessenberg."""
    h = a.copy()
    n = h.shape[0]
    q = np.eye(n, dtype=complex)
    for j in range(n - 2):
        x = h[j + 1 :, j]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[j + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ h[j + 1 :, :])
        h[:, j + 1 :] -= 2.0 * np.outer(h[:, j + 1 :] @ v, v.conj())
        q[:, j + 1 :] -= 2.0 * np.outer(q[:, j + 1 :] @ v, v.conj())
        h[j + 2 :, j] = 0.0
    return h, q


def _wilkinson_shift(a: complex, b: complex, c: complex, d: complex) -> complex:
    """Eigenvalue of [[a, b], [c, d]] closest to d."""
    t = (a - d) / 2.0
    bc = b * c
    disc = cmath.sqrt(t * t + bc)
    den = t + disc if abs(t + disc) >= abs(t - disc) else t - disc
    if den == 0:
        return d
    return d - bc / den


def _qr_sweep(h: np.ndarray, q: np.ndarray, lo: int, hi: int, mu: complex) -> None:
    """One explicitly shifted QR step on the active window h[lo:hi+1, lo:hi+1], in place."""
    idx = np.arange(lo, hi + 1)
    h[idx, idx] -= mu
    rotations = []
    for i in range(lo, hi):
        x, y = h[i, i], h[i + 1, i]
        r = math.hypot(abs(x), abs(y))
        c, s = (1.0 + 0j, 0j) if r == 0.0 else (x / r, y / r)
        top = h[i, i:].copy()
        bottom = h[i + 1, i:].copy()
        h[i, i:] = c.conjugate() * top + s.conjugate() * bottom
        h[i + 1, i:] = -s * top + c * bottom
        h[i + 1, i] = 0.0
        rotations.append((c, s))
    for offset, (c, s) in enumerate(rotations):
        i = lo + offset
        for mat, rows in ((h, i + 2), (q, q.shape[0])):
            left = mat[:rows, i].copy()
            right = mat[:rows, i + 1].copy()
            mat[:rows, i] = c * left + s * right
            mat[:rows, i + 1] = -s.conjugate() * left + c.conjugate() * right
    h[idx, idx] += mu


def eigenvalues(
    a: ComplexMatrix,
    tol: float = DEFAULT_EIG_TOL,
    sweeps_per_order: int = DEFAULT_SWEEPS_PER_ORDER,
    max_order: int = MAX_ORDER,
) -> Spectrum:
    """
    All n eigenvalues of `a`, listed with algebraic multiplicity.

    Parameters
    ----------
    a : ComplexMatrix
        Square matrix of order at most `max_order`.
    tol : float
        Relative deflation tolerance; a subdiagonal entry is dropped once it is
        below tol * (|h_ii| + |h_i-1,i-1|) or eps * ||A||_F.
    sweeps_per_order : int
        The sweep budget is sweeps_per_order * n.

    Raises
    ------
    ConvergenceError
        When the budget runs out; `partial` holds the eigenvalues deflated so far.
    """
    n = a.order
    if n > max_order:
        raise ParameterError(f"order {n} exceeds the supported maximum {max_order}")
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")

    base = a.entries.astype(complex)
    anorm = math.sqrt(frobenius_norm_sq(a))
    if n == 1:
        return Spectrum(eigenvalues=_freeze(base.diagonal().copy()), residual=0.0, sweeps=0)

    h, q = _hessenberg(base)
    budget = sweeps_per_order * n
    sweeps = 0
    stalled = 0
    hi = n - 1
    while hi > 0:
        lo = hi
        while lo > 0:
            sub = abs(h[lo, lo - 1])
            if sub <= tol * (abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])) or sub <= _EPS * anorm:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            logger.debug("deflated eigenvalue %d after %d sweeps", hi, sweeps)
            hi -= 1
            stalled = 0
            continue
        if sweeps >= budget:
            partial = h.diagonal()[hi + 1 :].copy()
            raise ConvergenceError(
                f"QR iteration did not converge within {budget} sweeps ({n - hi - 1} of {n} eigenvalues found)",
                partial=partial,
                sweeps=sweeps,
            )
        sweeps += 1
        stalled += 1
        if stalled % EXCEPTIONAL_EVERY == 0:
            mu = h[hi, hi] + abs(h[hi, hi - 1]) * cmath.exp(0.7j * stalled)
            logger.debug("exceptional shift at window [%d, %d]", lo, hi)
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        _qr_sweep(h, q, lo, hi, mu)

    t = np.triu(h)
    residual = 0.0
    if anorm > 0:
        residual = float(np.linalg.norm(base @ q - q @ t) / anorm)
    if residual > max(tol, 1e3 * n * _EPS):
        logger.warning("eigensolver residual %.3e above tolerance %.3e", residual, tol)
    return Spectrum(eigenvalues=_freeze(t.diagonal().copy()), residual=residual, sweeps=sweeps)


def _freeze(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    values.setflags(write=False)
    return values


def _power_sums(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    sums = np.zeros(n, dtype=complex)
    power = a.copy()
    for p in range(n):
        sums[p] = np.trace(power)
        power = power @ a
    return sums


def _charpoly_coefficients(a: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients (highest degree first) via Newton's identities."""
    n = a.shape[0]
    p = _power_sums(a)
    e = np.zeros(n + 1, dtype=complex)
    e[0] = 1.0
    for k in range(1, n + 1):
        acc = 0j
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * p[i - 1]
        e[k] = acc / k
    return np.array([(-1) ** j * e[j] for j in range(n + 1)])


def _aberth(coeffs: np.ndarray, max_iter: int = 500) -> np.ndarray:
    n = coeffs.size - 1
    # Fujiwara bound on the root moduli
    terms = [abs(coeffs[j]) ** (1.0 / j) for j in range(1, n)] + [abs(coeffs[n] / 2.0) ** (1.0 / n)]
    radius = 2.0 * max(terms)
    if radius == 0.0:
        return np.zeros(n, dtype=complex)
    angles = 2.0 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)
    deriv = np.polyder(coeffs)
    for _ in range(max_iter):
        pz = np.polyval(coeffs, z)
        dz = np.polyval(deriv, z)
        safe = np.where(dz == 0, _EPS, dz)
        w = pz / safe
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        repulsion = np.sum(1.0 / diff, axis=1) - 1.0
        step = w / (1.0 - w * repulsion)
        z = z - step
        if np.all(np.abs(step) <= 4 * _EPS * (1.0 + np.abs(z))):
            break
    return z


def charpoly_eigenvalues(a: ComplexMatrix) -> np.ndarray:
    """
    Eigenvalues from the characteristic polynomial, for n <= 8.

    Power sums tr(B^p) of the centred matrix give the coefficients through
    Newton's identities; Aberth-Ehrlich iteration finds the roots. Multiple
    eigenvalues come back with accuracy of order eps^(1/multiplicity).
    """
    n = a.order
    if n > CHARPOLY_MAX_ORDER:
        raise ParameterError(f"characteristic-polynomial oracle supports n <= {CHARPOLY_MAX_ORDER}, got {n}")
    shift = trace(a) / n
    centred = a.entries - shift * np.eye(n)
    roots = _aberth(_charpoly_coefficients(centred))
    return _freeze(roots + shift)


def match_distance(first: np.ndarray, second: np.ndarray) -> float:
    """Largest pairing distance after greedy nearest-neighbour matching of two multisets."""
    if first.size != second.size:
        raise ParameterError(f"cannot match {first.size} values against {second.size}")
    remaining = list(second)
    worst = 0.0
    for z in first:
        dist = [abs(z - w) for w in remaining]
        j = int(np.argmin(dist))
        worst = max(worst, dist[j])
        remaining.pop(j)
    return worst


def cross_check(a: ComplexMatrix, tol: float = 1e-8) -> Tuple[bool, float]:
    """Compare QR eigenvalues with the characteristic-polynomial roots; distance relative to max(||A||_F, 1)."""
    qr = eigenvalues(a).eigenvalues
    roots = charpoly_eigenvalues(a)
    scale = max(math.sqrt(frobenius_norm_sq(a)), 1.0)
    dist = match_distance(qr, roots) / scale
    return dist <= tol, dist


def effective_eigenvalues(spectrum: SpectrumLike, m: int) -> np.ndarray:
    """The m eigenvalues of largest modulus, dropping the zeros excluded by a rank override."""
    lam = _values(spectrum)
    if m >= lam.size:
        return lam
    order = np.argsort(-np.abs(lam), kind="stable")
    return lam[order[:m]]


def _coordinates(region: Region, lam: np.ndarray) -> Tuple[np.ndarray, complex, float]:
    """(points, centre, radius) in the plane for a disk, on the line for a strip."""
    if isinstance(region, Disk):
        centre = region.claim.known if region.claim.known is not None else region.center
        return lam, complex(centre), region.radius
    pick = np.real if region.axis == "real" else np.imag
    if region.claim.known is not None:
        centre = float(pick(region.claim.known))
    else:
        centre = region.center
    return pick(lam).astype(complex), complex(centre), region.half_width


def verify_region(region: Region, spectrum: SpectrumLike, slack: float) -> Tuple[bool, float]:
    """
    Evaluate the region's claim against the eigenvalues.

    The margin is positive when the claim holds with room to spare: radius minus
    the distance of the count-th nearest eigenvalue for inclusion claims, and
    farthest distance minus radius for the outer circle. Claims pass when the
    margin is at least -slack.
    """
    if slack < 0:
        raise ParameterError(f"slack must be non-negative, got {slack}")
    if not isinstance(region, (Disk, AxisStrip)):
        raise ParameterError(f"cannot verify {type(region).__name__}")
    lam = _values(spectrum)
    points, centre, radius = _coordinates(region, lam)
    dist = np.sort(np.abs(points - centre))
    claim = region.claim

    if claim.kind == "at_least_one_on_or_outside":
        margin = float(dist[-1]) - radius
    elif claim.kind == "contains_one_more_given":
        if dist.size < 2:
            return False, -math.inf
        # the nearest point stands for the known eigenvalue itself
        margin = radius - float(dist[1])
    else:
        count = dist.size if claim.kind == "contains_all" else int(claim.count)
        if count <= 0:
            return True, math.inf
        if count > dist.size:
            return False, -math.inf
        margin = radius - float(dist[count - 1])
    return margin >= -slack, margin


def verify_extremal(bounds: ExtremalBounds, spectrum: SpectrumLike, slack: float) -> Tuple[bool, float]:
    """Check lambda_max >= lower_bound_on_max and lambda_min <= upper_bound_on_min on real parts."""
    re = np.real(_values(spectrum))
    margin = min(float(np.max(re)) - bounds.lower_bound_on_max, bounds.upper_bound_on_min - float(np.min(re)))
    return margin >= -slack, margin


def verify_spread(bound: SpreadBound, spectrum: SpectrumLike, slack: float) -> Tuple[bool, float]:
    """
    Check a spread bound. Real and imaginary parts are sorted ascending and the
    difference at positions (l, k) is compared; the asserted modulus bound is
    compared with the full spread max |lambda_i - lambda_j|.
    """
    if not bound.asserted:
        raise ParameterError(f"{bound.pair_kind} bound at {bound.indices} is not asserted")
    lam = _values(spectrum)
    l, k = bound.indices
    if bound.pair_kind == "modulus":
        observed = float(np.max(np.abs(lam[:, None] - lam[None, :])))
    else:
        part = np.sort(lam.real if bound.pair_kind == "real_parts" else lam.imag)
        observed = float(part[k - 1] - part[l - 1])
    margin = bound.upper - observed
    return margin >= -slack, margin
