"""
Means and population variances of real, complex and weighted sequences, and
the lower bounds on those variances used to localise eigenvalues.

Positions (j, l, k) are 1-based, matching the way the inequalities are
usually written; sorting is the caller's job and is checked, never done
silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence, Tuple

import numpy as np

from tracebound.errors import DegenerateSizeError, IndexRangeError, ParameterError, PreconditionError

Part = Literal["real", "imag", "modulus"]
ProjectionPart = Literal["real", "imag", "direction"]

_EPS = np.finfo(float).eps


def _frozen(values: Sequence[complex] | np.ndarray, dtype: type) -> np.ndarray:
    arr = np.array(values, dtype=dtype).reshape(-1)
    if arr.size == 0:
        raise DegenerateSizeError("sequence must contain at least one value")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("sequence values must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RealSequenceStats:
    values: np.ndarray
    mean: float
    variance: float

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def is_sorted(self) -> bool:
        return bool(np.all(np.diff(self.values) >= 0))

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class ComplexSequenceStats:
    values: np.ndarray
    mean: complex
    complex_variance: complex
    abs_variance: float

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.values)))

    def real_part_stats(self) -> RealSequenceStats:
        return real_stats(self.values.real)

    def imag_part_stats(self) -> RealSequenceStats:
        return real_stats(self.values.imag)


@dataclass(frozen=True, eq=False)
class WeightedSequenceStats:
    values: np.ndarray
    weights: np.ndarray
    weighted_mean: float
    weighted_variance: float

    @property
    def n(self) -> int:
        return int(self.values.size)


def real_stats(values: Sequence[float] | np.ndarray) -> RealSequenceStats:
    """Mean and population (divide-by-n) variance, computed in two passes."""
    x = _frozen(values, float)
    mean = float(np.mean(x))
    dev = x - mean
    return RealSequenceStats(values=x, mean=mean, variance=float(np.mean(dev * dev)))


def complex_stats(values: Sequence[complex] | np.ndarray) -> ComplexSequenceStats:
    """Mean, complex variance S^2 and absolute variance S_z^2 of complex values."""
    z = _frozen(values, complex)
    mean = complex(np.mean(z))
    dev = z - mean
    return ComplexSequenceStats(
        values=z,
        mean=mean,
        complex_variance=complex(np.mean(dev * dev)),
        abs_variance=float(np.mean(np.abs(dev) ** 2)),
    )


def weighted_stats(values: Sequence[float] | np.ndarray, weights: Sequence[float] | np.ndarray) -> WeightedSequenceStats:
    x = _frozen(values, float)
    p = _frozen(weights, float)
    if p.size != x.size:
        raise ParameterError(f"got {x.size} values but {p.size} weights")
    if np.any(p < 0):
        raise ParameterError("weights must be non-negative")
    if abs(float(np.sum(p)) - 1.0) > x.size * _EPS * 4:
        raise ParameterError(f"weights must sum to 1, got {float(np.sum(p))!r}")
    mean = float(np.dot(p, x))
    dev = x - mean
    return WeightedSequenceStats(values=x, weights=p, weighted_mean=mean, weighted_variance=float(np.dot(p, dev * dev)))


def _require_size(n: int, minimum: int = 2) -> None:
    if n < minimum:
        raise DegenerateSizeError(f"need at least {minimum} values, got {n}")


def _require_position(j: int, n: int, name: str = "j") -> None:
    if not 1 <= j <= n:
        raise IndexRangeError(f"{name}={j} outside 1..{n}")


def _require_pair(l: int, k: int, n: int) -> None:
    if not (1 <= l < k <= n):
        raise IndexRangeError(f"need 1 <= l < k <= n, got l={l}, k={k}, n={n}")


def _require_sorted(x: np.ndarray, what: str = "values") -> None:
    if np.any(np.diff(x) < 0):
        raise PreconditionError(f"{what} must be sorted in ascending order")


def pair_coefficient(n: int, l: int, k: int) -> float:
    """n(n+l-k+1) / (2l(n-k+1)), the factor shared by the difference bounds."""
    return n * (n + l - k + 1) / (2.0 * l * (n - k + 1))


def samuelson_bound(stats: RealSequenceStats, j: int) -> float:
    """(x_j - mean)^2 / (n-1); never exceeds the variance."""
    _require_size(stats.n)
    _require_position(j, stats.n)
    dev = stats.values[j - 1] - stats.mean
    return float(dev * dev / (stats.n - 1))


def nagy_bound(stats: RealSequenceStats) -> float:
    """Squared range over 2n."""
    _require_size(stats.n)
    spread = float(np.max(stats.values) - np.min(stats.values))
    return spread * spread / (2.0 * stats.n)


def fahmy_prochan_bound(stats: RealSequenceStats, l: int, k: int) -> float:
    """
    l(n-k+1) / (n(n+l-k+1)) * (x_k - x_l)^2 for sorted data.

    With l=1 and k=n this is exactly the Nagy bound.
    """
    n = stats.n
    _require_size(n)
    _require_pair(l, k, n)
    _require_sorted(stats.values)
    diff = float(stats.values[k - 1] - stats.values[l - 1])
    return l * (n - k + 1) * diff * diff / (n * (n + l - k + 1))


def weighted_variance_bound(stats: WeightedSequenceStats, j: int) -> float:
    """p_j / (1 - p_j) * (mean - x_j)^2; reduces to Samuelson for uniform weights."""
    _require_position(j, stats.n)
    p = float(stats.weights[j - 1])
    if abs(1.0 - p) <= stats.n * _EPS:
        raise ParameterError(f"weight p_{j} is 1; the bound divides by 1 - p_{j}")
    dev = stats.weighted_mean - float(stats.values[j - 1])
    return p / (1.0 - p) * dev * dev


def order_statistic_bound(stats: RealSequenceStats, k: int) -> Tuple[float, float]:
    """
    k/(n-k) * (mean - x_j)^2 at j = k and j = n-k+1, for sorted data.

    Returns (bound_at_k, bound_at_n_minus_k_plus_1).
    """
    n = stats.n
    _require_size(n)
    _require_position(k, n, "k")
    if k > n - k + 1:
        raise PreconditionError(f"need k <= n-k+1, got k={k}, n={n}")
    _require_sorted(stats.values)
    coef = k / (n - k)
    low = stats.mean - float(stats.values[k - 1])
    high = stats.mean - float(stats.values[n - k])
    return coef * low * low, coef * high * high


def _part_combination(stats: ComplexSequenceStats, part: str) -> float:
    if part == "real":
        return stats.abs_variance + stats.complex_variance.real
    if part == "imag":
        return stats.abs_variance - stats.complex_variance.real
    if part in ("modulus", "direction"):
        return stats.abs_variance + abs(stats.complex_variance)
    raise ParameterError(f"unknown part {part!r}")


def complex_difference_bound(stats: ComplexSequenceStats, l: int, k: int, part: Part) -> float:
    """
    Right-hand side n(n+l-k+1)/(2l(n-k+1)) * M of the complex difference bounds.

    M is S_z^2 + Re S^2 (real parts), S_z^2 - Re S^2 (imaginary parts) or
    S_z^2 + |S^2| (modulus). For the real and imaginary parts the values must be
    sorted by that part, and the result bounds |x_k - x_l|^2 resp. |y_k - y_l|^2.
    """
    n = stats.n
    _require_pair(l, k, n)
    if part == "real":
        _require_sorted(stats.values.real, "real parts")
    elif part == "imag":
        _require_sorted(stats.values.imag, "imaginary parts")
    return pair_coefficient(n, l, k) * max(_part_combination(stats, part), 0.0)


def _check_direction(direction: complex) -> complex:
    alpha = complex(direction)
    if abs(abs(alpha) - 1.0) > 8 * _EPS:
        raise PreconditionError(f"direction must have modulus 1, got |{alpha}| = {abs(alpha)!r}")
    return alpha


def projected_variance(values: Sequence[complex] | np.ndarray, direction: complex) -> float:
    """Variance of Re(direction * z); at most (S_z^2 + |S^2|) / 2."""
    alpha = _check_direction(direction)
    return real_stats((alpha * np.asarray(values, dtype=complex)).real).variance


def directional_projection_check(values: Sequence[complex] | np.ndarray, direction: complex, l: int, k: int) -> bool:
    """
    Sort by Re(direction * z) and test the projected difference at positions l, k
    against the modulus bound. Always holds; the caller uses it as a property.
    """
    alpha = _check_direction(direction)
    stats = complex_stats(values)
    _require_pair(l, k, stats.n)
    projected = np.sort((alpha * stats.values).real)
    diff = float(projected[k - 1] - projected[l - 1])
    bound = complex_difference_bound(stats, l, k, "modulus")
    tol = 1e-12 * max(stats.scale, 1.0) ** 2
    return diff * diff <= bound + tol


def complex_order_statistic_bound(
    stats: ComplexSequenceStats,
    k: int,
    part: ProjectionPart,
    direction: complex = 1.0,
) -> Tuple[float, float]:
    """
    2k/(n-k) * |mean - x_j|^2 at j = k and j = n-k+1 of the chosen projection.

    `real` and `imag` use the real/imaginary parts (which must be sorted) and are
    bounded by S_z^2 + Re S^2 and S_z^2 - Re S^2; `direction` projects onto
    Re(direction * z), sorts internally, and is bounded by S_z^2 + |S^2|. Returned
    values are squared, matching the bounds they are compared with.
    """
    n = stats.n
    _require_size(n)
    _require_position(k, n, "k")
    if k > n - k + 1:
        raise PreconditionError(f"need k <= n-k+1, got k={k}, n={n}")

    if part == "real":
        x = stats.values.real
        _require_sorted(x, "real parts")
    elif part == "imag":
        x = stats.values.imag
        _require_sorted(x, "imaginary parts")
    elif part == "direction":
        x = np.sort((_check_direction(direction) * stats.values).real)
    else:
        raise ParameterError(f"unknown part {part!r}")

    coef = 2.0 * k / (n - k)
    mean = float(np.mean(x))
    low = mean - float(x[k - 1])
    high = mean - float(x[n - k])
    return coef * low * low, coef * high * high


def power_deviation_bound(stats: ComplexSequenceStats, j: int, r: int) -> float:
    """
    (1 + (n-1)^(2r-1)) / (n (n-1)^(2r-1)) * |z_j - mean|^(2r).

    Bounded above by absolute_moment(stats, r). For r=1 the coefficient is 1/(n-1).
    """
    n = stats.n
    _require_size(n)
    _require_position(j, n)
    if r < 1:
        raise ParameterError(f"r must be a positive integer, got {r}")
    power = (n - 1) ** (2 * r - 1)
    coef = (1 + power) / (n * power)
    return coef * abs(stats.values[j - 1] - stats.mean) ** (2 * r)


def absolute_moment(stats: ComplexSequenceStats, r: int) -> float:
    """(1/n) * sum |z_i - mean|^(2r)."""
    if r < 1:
        raise ParameterError(f"r must be a positive integer, got {r}")
    return float(np.mean(np.abs(stats.values - stats.mean) ** (2 * r)))


def variance_slack(scale: float, factor: float = 1e-12) -> float:
    """Additive slack for `bound <= variance` comparisons on data of the given scale."""
    return factor * max(scale, 1.0) ** 2


def sqrt_nonneg(value: float) -> float:
    return math.sqrt(max(value, 0.0))
