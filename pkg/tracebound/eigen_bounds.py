"""
Localisation regions, spread bounds and extremal-eigenvalue bounds computed
from SpectralStats alone.

Every region carries the claim it makes about the spectrum; nothing here
needs eigenvalues. Checking the claims is the job of spectral_oracle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Optional, Tuple, Union

from tracebound.errors import ConsistencyError, DegenerateSizeError, IndexRangeError, ModeError, ParameterError
from tracebound.matrix_core import DEFAULT_NORMAL_TOL, CenteredMatrix, SpectralStats, frobenius_norm_sq, is_normal
from tracebound.variance_kernel import pair_coefficient, sqrt_nonneg

logger = logging.getLogger(__name__)

ClaimKind = Literal["contains_at_least", "contains_all", "contains_one_more_given", "at_least_one_on_or_outside"]
Axis = Literal["real", "imag"]
PairKind = Literal["modulus", "real_parts", "imag_parts"]


def complex_to_pair(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def pair_to_complex(pair: Any) -> complex:
    re, im = pair
    return complex(float(re), float(im))


@dataclass(frozen=True)
class Claim:
    kind: ClaimKind
    count: Optional[int] = None
    known: Optional[complex] = None

    def describe(self) -> str:
        if self.kind == "contains_at_least":
            return f"contains at least {self.count}"
        if self.kind == "contains_one_more_given":
            return f"contains one more besides {format_complex(self.known)}"
        return self.kind.replace("_", " ")

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind}
        if self.count is not None:
            out["count"] = self.count
        if self.known is not None:
            out["known"] = complex_to_pair(self.known)
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Claim":
        known = data.get("known")
        return cls(
            kind=data["kind"],
            count=data.get("count"),
            known=pair_to_complex(known) if known is not None else None,
        )


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float
    claim: Claim
    theorem: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": "disk",
            "theorem": self.theorem,
            "parameters": dict(self.parameters),
            "center": complex_to_pair(self.center),
            "radius": self.radius,
            "claim": self.claim.to_dict(),
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class AxisStrip:
    axis: Axis
    center: float
    half_width: float
    claim: Claim
    theorem: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": "strip",
            "theorem": self.theorem,
            "parameters": dict(self.parameters),
            "axis": self.axis,
            "center": self.center,
            "half_width": self.half_width,
            "claim": self.claim.to_dict(),
            "notes": list(self.notes),
        }


Region = Union[Disk, AxisStrip]


def region_from_dict(data: Dict[str, Any]) -> Region:
    claim = Claim.from_dict(data["claim"])
    common = dict(theorem=data["theorem"], parameters=dict(data["parameters"]), notes=tuple(data["notes"]))
    if data["type"] == "disk":
        return Disk(center=pair_to_complex(data["center"]), radius=float(data["radius"]), claim=claim, **common)
    if data["type"] == "strip":
        return AxisStrip(
            axis=data["axis"], center=float(data["center"]), half_width=float(data["half_width"]), claim=claim, **common
        )
    raise ParameterError(f"unknown region type {data['type']!r}")


@dataclass(frozen=True)
class ExtremalBounds:
    lower_bound_on_max: float
    upper_bound_on_min: float
    method: str
    r: int
    center: float
    offset: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "r": self.r,
            "center": self.center,
            "offset": self.offset,
            "lower_bound_on_max": self.lower_bound_on_max,
            "upper_bound_on_min": self.upper_bound_on_min,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExtremalBounds":
        return cls(**data)


@dataclass(frozen=True)
class SpreadBound:
    upper: float
    pair_kind: PairKind
    indices: Tuple[int, int]
    asserted: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {"pair_kind": self.pair_kind, "indices": list(self.indices), "upper": self.upper, "asserted": self.asserted}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SpreadBound":
        return cls(
            upper=float(data["upper"]),
            pair_kind=data["pair_kind"],
            indices=(int(data["indices"][0]), int(data["indices"][1])),
            asserted=bool(data["asserted"]),
        )


def format_complex(z: Optional[complex], decimals: int = 6) -> str:
    if z is None:
        return ""
    z = complex(z)
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real:.{decimals}f}{sign}{abs(z.imag):.{decimals}f}i"


def max_central_k(m: int) -> int:
    """Largest k with k <= (m+1)/2."""
    return (m + 1) // 2


def central_disks(stats: SpectralStats, k: int) -> Tuple[Disk, AxisStrip, AxisStrip]:
    """
    Disk about trA/m and strips about its real and imaginary parts, each
    holding at least m-2k+2 eigenvalues (real/imaginary parts for the strips).

    For k >= 2 and a spectrum not known to be real the disk radius is widened to
    sqrt(m S_lambda^2 / (2k-1)) when that is larger, since the stated radius can
    miss the count for complex spectra.
    """
    m = stats.effective_dim
    if not 1 <= k <= max_central_k(m):
        raise ParameterError(f"k must lie in 1..{max_central_k(m)} for dimension {m}, got {k}")

    s_lambda = stats.abs_variance
    s2 = stats.complex_variance
    coef = (m - k) / (2.0 * k)
    count = m - 2 * k + 2
    theorem_radius = sqrt_nonneg(coef * (s_lambda + abs(s2)))

    radius = theorem_radius
    notes: Tuple[str, ...] = ()
    if k == 1:
        notes = ("k=1 is the Huang-Wang disk",)
    elif not stats.real_spectrum:
        second_moment = sqrt_nonneg(m * s_lambda / (2 * k - 1))
        if second_moment > theorem_radius:
            logger.debug("widening central disk k=%d from %.6g to %.6g", k, theorem_radius, second_moment)
            radius = second_moment
            notes = ("radius widened to the second-moment radius for a complex spectrum",)

    params: Dict[str, Any] = {"k": k, "theorem_radius": theorem_radius}
    disk = Disk(
        center=stats.mean,
        radius=radius,
        claim=Claim("contains_at_least", count=count),
        theorem="central_disk",
        parameters=params,
        notes=notes,
    )
    real_strip = AxisStrip(
        axis="real",
        center=stats.mean.real,
        half_width=sqrt_nonneg(coef * (s_lambda + s2.real)),
        claim=Claim("contains_at_least", count=count),
        theorem="central_strip",
        parameters={"k": k},
    )
    imag_strip = AxisStrip(
        axis="imag",
        center=stats.mean.imag,
        half_width=sqrt_nonneg(coef * (s_lambda - s2.real)),
        claim=Claim("contains_at_least", count=count),
        theorem="central_strip",
        parameters={"k": k},
    )
    return disk, real_strip, imag_strip


def spread_upper_bounds(stats: SpectralStats, l: int, k: int) -> Tuple[SpreadBound, SpreadBound, SpreadBound]:
    """
    Upper bounds on |alpha_k - alpha_l|, |beta_k - beta_l| (parts sorted
    ascending) and on the modulus difference. Only the modulus bound for
    l=1, k=m is asserted: it bounds the spread max |lambda_i - lambda_j|.
    """
    m = stats.effective_dim
    if not 1 <= l < k <= m:
        raise IndexRangeError(f"need 1 <= l < k <= {m}, got l={l}, k={k}")
    coef = pair_coefficient(m, l, k)
    s_lambda = stats.abs_variance
    s2 = stats.complex_variance
    idx = (l, k)
    return (
        SpreadBound(sqrt_nonneg(coef * (s_lambda + s2.real)), "real_parts", idx),
        SpreadBound(sqrt_nonneg(coef * (s_lambda - s2.real)), "imag_parts", idx),
        SpreadBound(sqrt_nonneg(coef * (s_lambda + abs(s2))), "modulus", idx, asserted=(l == 1 and k == m)),
    )


def neighbor_disk(stats: SpectralStats, known: complex) -> Tuple[Disk, AxisStrip, AxisStrip]:
    """
    Regions about a known eigenvalue that hold at least one more eigenvalue
    (real/imaginary part for the strips).

    For a spectrum not known to be real the disk radius is widened to the
    root-mean-square distance from `known` to the other eigenvalues,
    sqrt(m (S_lambda^2 + |known - trA/m|^2) / (m-1)), when that is larger.
    """
    m = stats.effective_dim
    if m < 2:
        raise DegenerateSizeError("a second eigenvalue needs dimension at least 2")
    known = complex(known)
    factor = m / math.sqrt(2.0 * (m - 1))
    s_lambda = stats.abs_variance
    s2 = stats.complex_variance
    theorem_radius = factor * sqrt_nonneg(s_lambda + abs(s2))

    radius = theorem_radius
    notes: Tuple[str, ...] = ()
    if not stats.real_spectrum:
        rms = sqrt_nonneg(m * (s_lambda + abs(known - stats.mean) ** 2) / (m - 1))
        if rms > theorem_radius:
            logger.debug("widening neighbor disk from %.6g to %.6g", theorem_radius, rms)
            radius = rms
            notes = ("radius widened to the rms neighbor distance for a complex spectrum",)

    claim = Claim("contains_one_more_given", known=known)
    disk = Disk(
        center=known,
        radius=radius,
        claim=claim,
        theorem="neighbor_disk",
        parameters={"theorem_radius": theorem_radius},
        notes=notes,
    )
    real_strip = AxisStrip(
        axis="real",
        center=known.real,
        half_width=factor * sqrt_nonneg(s_lambda + s2.real),
        claim=claim,
        theorem="neighbor_strip",
    )
    imag_strip = AxisStrip(
        axis="imag",
        center=known.imag,
        half_width=factor * sqrt_nonneg(s_lambda - s2.real),
        claim=claim,
        theorem="neighbor_strip",
    )
    return disk, real_strip, imag_strip


def _power_ratio(m: int, r: int) -> Tuple[int, int]:
    """((m-1)^(2r-1), 1 + (m-1)^(2r-1)) as exact integers."""
    p = (m - 1) ** (2 * r - 1)
    return p, 1 + p


def all_eigs_disk(b: CenteredMatrix, r: int, moment: float) -> Disk:
    """
    Disk about trA/m holding every eigenvalue, given `moment` >= sum |lambda_i(B)|^(2r).

    Radius ((m-1)^(2r-1) / (1 + (m-1)^(2r-1)) * moment)^(1/(2r)).
    """
    if r < 1:
        raise ParameterError(f"r must be a positive integer, got {r}")
    if moment < 0:
        raise ParameterError(f"moment must be non-negative, got {moment}")
    m = b.effective_dim
    p, q = _power_ratio(m, r)
    radius = (p / q * moment) ** (1.0 / (2 * r))
    claim = Claim("contains_all") if b.excluded == 0 else Claim("contains_at_least", count=m)
    return Disk(center=b.shift, radius=radius, claim=claim, theorem="all_eigenvalues_disk", parameters={"r": r, "moment": moment})


def outer_circle(b: CenteredMatrix, r: int, normal_tol: float = DEFAULT_NORMAL_TOL) -> Disk:
    """
    Circle about trA/m with at least one eigenvalue on or outside it (normal A).

    Radius (tr B^r (B^r)* / m)^(1/(2r)); the same expression without the /m
    does not follow from the mean-versus-maximum argument and is only recorded.
    """
    if r < 1:
        raise ParameterError(f"r must be a positive integer, got {r}")
    if not is_normal(b.base, normal_tol):
        raise ModeError("the outer circle needs a normal matrix")
    m = b.effective_dim
    total = frobenius_norm_sq(b.matrix.power(r))
    stated = total ** (1.0 / (2 * r))
    if b.excluded:
        total -= b.excluded * abs(b.shift) ** (2 * r)
    radius = (max(total, 0.0) / m) ** (1.0 / (2 * r))
    return Disk(
        center=b.shift,
        radius=radius,
        claim=Claim("at_least_one_on_or_outside"),
        theorem="outer_circle",
        parameters={"r": r, "stated_radius": stated},
        notes=("radius divides the power trace by m",),
    )


def _require_real_spectrum(stats: SpectralStats) -> None:
    if not stats.real_spectrum:
        raise ModeError("extremal bounds need a spectrum known to be real (hermitian input or an explicit assertion)")
    if stats.effective_dim < 2:
        raise DegenerateSizeError("extremal bounds need dimension at least 2")


def wolkowicz_styan_bounds(stats: SpectralStats, tr_b2: float) -> ExtremalBounds:
    """lambda_max >= trA/m + sqrt(trB^2 / (m(m-1))), and the mirror bound on lambda_min."""
    _require_real_spectrum(stats)
    if tr_b2 < 0:
        raise ParameterError(f"tr B^2 must be non-negative for a real spectrum, got {tr_b2}")
    m = stats.effective_dim
    center = stats.mean.real
    offset = math.sqrt(tr_b2 / (m * (m - 1)))
    return ExtremalBounds(center + offset, center - offset, "wolkowicz_styan", 1, center, offset)


def moment_extremal_bounds(stats: SpectralStats, tr_b2: float, tr_b2r: float, r: int) -> ExtremalBounds:
    """
    Extremal bounds from tr B^2 and tr B^(2r) for a real spectrum:

        lambda_max >= trA/m + (trB^2/m) * ((1 + (m-1)^(2r-1)) / ((m-1)^(2r-1) trB^(2r)))^(1/(2r))

    and the mirror bound on lambda_min. At r=1 this is the Wolkowicz-Styan bound.
    """
    _require_real_spectrum(stats)
    if r < 1:
        raise ParameterError(f"r must be a positive integer, got {r}")
    if tr_b2 < 0 or tr_b2r < 0:
        raise ParameterError(f"power traces must be non-negative, got tr B^2={tr_b2}, tr B^2r={tr_b2r}")
    m = stats.effective_dim
    center = stats.mean.real
    if tr_b2r == 0:
        if tr_b2 > 0:
            raise ConsistencyError("tr B^2r = 0 while tr B^2 > 0 is impossible for a real spectrum")
        offset = 0.0
    else:
        p, q = _power_ratio(m, r)
        offset = tr_b2 / m * (q / p / tr_b2r) ** (1.0 / (2 * r))
    return ExtremalBounds(center + offset, center - offset, f"moment_r{r}", r, center, offset)
