"""
Bound reports for a single matrix: statistics, every requested region and
bound, optional oracle verification, and tabular export via pandas.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from tracebound import __version__
from tracebound.config import TraceboundConfig
from tracebound.eigen_bounds import (
    AxisStrip,
    Disk,
    ExtremalBounds,
    Region,
    SpreadBound,
    all_eigs_disk,
    central_disks,
    complex_to_pair,
    format_complex,
    max_central_k,
    moment_extremal_bounds,
    neighbor_disk,
    outer_circle,
    pair_to_complex,
    region_from_dict,
    spread_upper_bounds,
    wolkowicz_styan_bounds,
)
from tracebound.ensembles import EnsembleSpec, generate
from tracebound.errors import ModeError, ParameterError, TraceboundError
from tracebound.matrix_core import (
    ComplexMatrix,
    SpectralStats,
    centered,
    frobenius_norm_sq,
    is_hermitian,
    is_normal,
    moment_upper_bound,
    spectral_stats,
)
from tracebound.matrix_io import parse_matrix
from tracebound.spectral_oracle import (
    Spectrum,
    effective_eigenvalues,
    eigenvalues,
    verify_extremal,
    verify_region,
    verify_spread,
)

logger = logging.getLogger(__name__)

MODES = {"oracle": "oracle", "normal": "normal_formula", "upper": "upper_bound"}
OUTPUT_FORMATS = ("json", "table", "csv")


@dataclass
class AnalysisConfig:
    """
    Everything `analyze` needs. Exactly one of `input_path` and `ensemble`
    names the matrix; `k_values=None` means every valid k.
    """

    input_path: Optional[str] = None
    input_format: Optional[str] = None
    ensemble: Optional[EnsembleSpec] = None

    k_values: Optional[Tuple[int, ...]] = None
    r_values: Tuple[int, ...] = (1, 2)
    s_lambda_mode: str = "auto"
    rank_override: Optional[int] = None
    known: Tuple[complex, ...] = ()
    real_spectrum: bool = False
    verify: bool = False

    output_format: str = "json"
    slack: float = 1e-9
    seed: int = 0
    settings: TraceboundConfig = field(default_factory=TraceboundConfig)

    def validate(self) -> None:
        if (self.input_path is None) == (self.ensemble is None):
            raise ParameterError("give exactly one of an input file and an ensemble")
        if self.s_lambda_mode != "auto" and self.s_lambda_mode not in MODES:
            raise ParameterError(f"unknown mode {self.s_lambda_mode!r}; expected auto, oracle, normal or upper")
        if self.output_format not in OUTPUT_FORMATS:
            raise ParameterError(f"unknown output format {self.output_format!r}")
        if not self.r_values or any(r < 1 for r in self.r_values):
            raise ParameterError(f"r values must be positive integers, got {list(self.r_values)}")
        if self.k_values is not None and any(k < 1 for k in self.k_values):
            raise ParameterError(f"k values must be positive integers, got {list(self.k_values)}")
        if self.slack < 0:
            raise ParameterError(f"slack must be non-negative, got {self.slack}")

    def provenance(self) -> Dict[str, Any]:
        return {
            "input_path": self.input_path,
            "input_format": self.input_format,
            "ensemble": None if self.ensemble is None else _ensemble_dict(self.ensemble),
            "k_values": None if self.k_values is None else list(self.k_values),
            "r_values": list(self.r_values),
            "s_lambda_mode": self.s_lambda_mode,
            "rank_override": self.rank_override,
            "known": [complex_to_pair(z) for z in self.known],
            "real_spectrum": self.real_spectrum,
            "verify": self.verify,
            "slack": self.slack,
        }


def _ensemble_dict(spec: EnsembleSpec) -> Dict[str, Any]:
    out = asdict(spec)
    if spec.values is not None:
        out["values"] = [complex_to_pair(v) for v in spec.values]
    return out


def _finite(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


@dataclass
class BoundReport:
    schema_version: str
    matrix: Dict[str, Any]
    stats: Dict[str, Any]
    regions: List[Region] = field(default_factory=list)
    spread_bounds: List[SpreadBound] = field(default_factory=list)
    extremal_bounds: List[ExtremalBounds] = field(default_factory=list)
    skipped: List[Dict[str, Any]] = field(default_factory=list)
    verification: Optional[Dict[str, Any]] = None
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def all_verified(self) -> bool:
        return self.verification is None or bool(self.verification["all_passed"])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "matrix": self.matrix,
            "stats": self.stats,
            "regions": [r.to_dict() for r in self.regions],
            "spread_bounds": [b.to_dict() for b in self.spread_bounds],
            "extremal_bounds": [b.to_dict() for b in self.extremal_bounds],
            "skipped": self.skipped,
            "verification": self.verification,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BoundReport":
        return cls(
            schema_version=data["schema_version"],
            matrix=dict(data["matrix"]),
            stats=dict(data["stats"]),
            regions=[region_from_dict(r) for r in data["regions"]],
            spread_bounds=[SpreadBound.from_dict(b) for b in data["spread_bounds"]],
            extremal_bounds=[ExtremalBounds.from_dict(b) for b in data["extremal_bounds"]],
            skipped=list(data["skipped"]),
            verification=data["verification"],
            provenance=dict(data["provenance"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"


def _stats_dict(stats: SpectralStats, power_traces: Dict[str, complex]) -> Dict[str, Any]:
    return {
        "n": stats.n,
        "effective_dim": stats.effective_dim,
        "trace": complex_to_pair(stats.trace),
        "trace_sq": complex_to_pair(stats.trace_sq),
        "mean": complex_to_pair(stats.mean),
        "complex_variance": complex_to_pair(stats.complex_variance),
        "abs_variance": stats.abs_variance,
        "abs_variance_source": stats.abs_variance_source,
        "real_part_variance": stats.real_part_variance,
        "imag_part_variance": stats.imag_part_variance,
        "real_spectrum": stats.real_spectrum,
        "centered_power_traces": {p: complex_to_pair(v) for p, v in power_traces.items()},
    }


def _load_matrix(config: AnalysisConfig) -> Tuple[ComplexMatrix, str]:
    if config.input_path is not None:
        return parse_matrix(config.input_path, config.input_format, config.settings.max_order), "file"
    assert config.ensemble is not None
    return generate(config.ensemble, 0), f"ensemble:{config.ensemble.kind}"


def _resolve_mode(config: AnalysisConfig, a: ComplexMatrix) -> str:
    if config.s_lambda_mode == "auto":
        return "normal_formula" if is_normal(a, config.settings.normal_tol) else "upper_bound"
    return MODES[config.s_lambda_mode]


class _Skips:
    def __init__(self) -> None:
        self.items: List[Dict[str, Any]] = []

    def add(self, theorem: str, parameters: Dict[str, Any], exc: TraceboundError) -> None:
        logger.warning("skipping %s %s: %s", theorem, parameters, exc)
        self.items.append({"theorem": theorem, "parameters": parameters, "reason": f"{type(exc).__name__}: {exc}"})


def analyze(config: AnalysisConfig) -> BoundReport:
    """
    Compute the bound report for one matrix.

    Gated theorems (outer circle on non-normal input, extremal bounds without a
    real spectrum, anything needing two eigenvalues on a 1x1 matrix) are
    listed under `skipped` instead of failing the run. Parse, shape, parameter
    and convergence errors propagate.
    """
    config.validate()
    cfg = config.settings
    a, source = _load_matrix(config)
    mode = _resolve_mode(config, a)

    spectrum: Optional[Spectrum] = None
    if mode == "oracle" or config.verify:
        spectrum = eigenvalues(a, cfg.eig_tol, cfg.sweeps_per_order, cfg.max_order)

    stats = spectral_stats(
        a,
        mode,
        rank_override=config.rank_override,
        spectrum=None if spectrum is None else spectrum.eigenvalues,
        real_spectrum=config.real_spectrum,
        normal_tol=cfg.normal_tol,
        hermitian_tol=cfg.hermitian_tol,
    )
    b = centered(a, config.rank_override)
    m = stats.effective_dim
    skips = _Skips()

    k_values = config.k_values if config.k_values is not None else tuple(range(1, max_central_k(m) + 1))
    regions: List[Region] = []
    for k in k_values:
        regions.extend(central_disks(stats, k))
    for known in config.known:
        try:
            regions.extend(neighbor_disk(stats, known))
        except TraceboundError as exc:
            skips.add("neighbor_disk", {"known": complex_to_pair(known)}, exc)

    oracle_dev = None if spectrum is None or mode != "oracle" else effective_eigenvalues(spectrum, m) - b.shift
    power_traces: Dict[str, complex] = {"2": b.effective_power_trace(2)}
    for r in config.r_values:
        power_traces[str(2 * r)] = b.effective_power_trace(2 * r)
        if oracle_dev is not None:
            moment = float(np.sum(np.abs(oracle_dev) ** (2 * r)))
        else:
            moment = moment_upper_bound(b, r)
        regions.append(all_eigs_disk(b, r, moment))
        try:
            regions.append(outer_circle(b, r, cfg.normal_tol))
        except ModeError as exc:
            skips.add("outer_circle", {"r": r}, exc)

    spreads: List[SpreadBound] = []
    if m >= 2:
        spreads.extend(spread_upper_bounds(stats, 1, m))

    extremal: List[ExtremalBounds] = []
    tr_b2 = max(power_traces["2"].real, 0.0)
    try:
        extremal.append(wolkowicz_styan_bounds(stats, tr_b2))
        for r in config.r_values:
            tr_b2r = max(power_traces[str(2 * r)].real, 0.0)
            extremal.append(moment_extremal_bounds(stats, tr_b2, tr_b2r, r))
    except TraceboundError as exc:
        skips.add("extremal_bounds", {"r_values": list(config.r_values)}, exc)
        extremal = []

    fro = math.sqrt(frobenius_norm_sq(a))
    report = BoundReport(
        schema_version=cfg.schema_version,
        matrix={
            "n": a.order,
            "source": source,
            "hermitian": is_hermitian(a, cfg.hermitian_tol),
            "normal": is_normal(a, cfg.normal_tol),
            "frobenius_norm": fro,
        },
        stats=_stats_dict(stats, power_traces),
        regions=regions,
        spread_bounds=spreads,
        extremal_bounds=extremal,
        skipped=skips.items,
        provenance={
            "tool": "tracebound",
            "version": __version__,
            "seed": config.seed,
            "config": config.provenance(),
        },
    )
    if config.verify:
        assert spectrum is not None
        report.verification = _verify(report, spectrum, m, config.slack * (fro + 1.0))
    return report


def _verify(report: BoundReport, spectrum: Spectrum, m: int, slack: float) -> Dict[str, Any]:
    claims: List[Dict[str, Any]] = []

    def add(section: str, index: int, label: str, outcome: Tuple[bool, float]) -> None:
        passed, margin = outcome
        claims.append({"section": section, "index": index, "label": label, "passed": passed, "margin": _finite(margin)})

    # claims are about the m eigenvalues left after a rank override
    effective = effective_eigenvalues(spectrum, m)
    for i, region in enumerate(report.regions):
        add("regions", i, _region_label(region), verify_region(region, effective, slack))
    for i, bound in enumerate(report.spread_bounds):
        if bound.asserted:
            add("spread_bounds", i, f"spread {bound.pair_kind} {bound.indices}", verify_spread(bound, effective, slack))
    for i, bound in enumerate(report.extremal_bounds):
        add("extremal_bounds", i, bound.method, verify_extremal(bound, effective, slack))

    ordered = spectrum.sorted_values()
    return {
        "eigenvalues": [complex_to_pair(z) for z in ordered],
        "residual": spectrum.residual,
        "sweeps": spectrum.sweeps,
        "slack": slack,
        "claims": claims,
        "all_passed": all(c["passed"] for c in claims),
    }


def _region_label(region: Region) -> str:
    params = ", ".join(f"{k}={v}" for k, v in region.parameters.items() if k in ("k", "r"))
    kind = "disk" if isinstance(region, Disk) else f"{region.axis} strip"
    return f"{region.theorem} {kind}" + (f" ({params})" if params else "")


def report_frames(report: BoundReport, decimals: int = 6) -> Dict[str, pd.DataFrame]:
    """The report as tables: stats, regions, bounds and (if run) verification."""

    def num(value: Any) -> Any:
        return round(value, decimals) if isinstance(value, float) else value

    def cplx(pair: Any) -> str:
        return format_complex(pair_to_complex(pair), decimals)

    st = report.stats
    stats_rows = [
        ("n", report.matrix["n"]),
        ("effective dimension", st["effective_dim"]),
        ("hermitian", report.matrix["hermitian"]),
        ("normal", report.matrix["normal"]),
        ("trA", cplx(st["trace"])),
        ("trA^2", cplx(st["trace_sq"])),
        ("S^2", cplx(st["complex_variance"])),
        (f"S_lambda^2 ({st['abs_variance_source']})", num(st["abs_variance"])),
    ]
    stats_rows += [(f"trB^{p}", cplx(v)) for p, v in st["centered_power_traces"].items()]
    stats_df = pd.DataFrame(stats_rows, columns=["quantity", "value"])

    margins: Dict[Tuple[str, int], Optional[float]] = {}
    if report.verification is not None:
        margins = {(c["section"], c["index"]): c["margin"] for c in report.verification["claims"]}

    region_rows = []
    for i, region in enumerate(report.regions):
        if isinstance(region, Disk):
            centre, size = format_complex(region.center, decimals), region.radius
        else:
            assert isinstance(region, AxisStrip)
            centre, size = f"{region.axis}={region.center:.{decimals}f}", region.half_width
        region_rows.append(
            {
                "theorem": region.theorem,
                "parameters": ", ".join(f"{k}={num(v)}" for k, v in region.parameters.items()),
                "center": centre,
                "radius": num(size),
                "claim": region.claim.describe(),
                "margin": num(margins.get(("regions", i))),
            }
        )
    regions_df = pd.DataFrame(region_rows, columns=["theorem", "parameters", "center", "radius", "claim", "margin"])

    bound_rows = []
    for i, sb in enumerate(report.spread_bounds):
        bound_rows.append(
            {
                "bound": f"spread {sb.pair_kind} l={sb.indices[0]} k={sb.indices[1]}",
                "value": num(sb.upper),
                "second": None,
                "asserted": sb.asserted,
                "margin": num(margins.get(("spread_bounds", i))),
            }
        )
    for i, eb in enumerate(report.extremal_bounds):
        bound_rows.append(
            {
                "bound": f"{eb.method} lambda_max >= / lambda_min <=",
                "value": num(eb.lower_bound_on_max),
                "second": num(eb.upper_bound_on_min),
                "asserted": True,
                "margin": num(margins.get(("extremal_bounds", i))),
            }
        )
    bounds_df = pd.DataFrame(bound_rows, columns=["bound", "value", "second", "asserted", "margin"])

    frames = {"stats": stats_df, "regions": regions_df, "bounds": bounds_df}
    if report.skipped:
        frames["skipped"] = pd.DataFrame(report.skipped, columns=["theorem", "parameters", "reason"])
    if report.verification is not None:
        eig = [cplx(p) for p in report.verification["eigenvalues"]]
        frames["eigenvalues"] = pd.DataFrame({"eigenvalue": eig})
    return frames


def render_table(report: BoundReport, decimals: int = 6) -> str:
    blocks = []
    for name, frame in report_frames(report, decimals).items():
        blocks.append(f"== {name} ==\n{frame.to_string(index=False)}")
    return "\n\n".join(blocks) + "\n"


def render_csv(report: BoundReport, decimals: int = 6) -> str:
    """Regions and bounds in one CSV, tagged by section."""
    frames = report_frames(report, decimals)
    regions = frames["regions"].assign(section="region")
    bounds = frames["bounds"].rename(columns={"bound": "theorem", "value": "radius"}).assign(section="bound")
    combined = pd.concat([regions, bounds], ignore_index=True)
    cols = ["section"] + [c for c in combined.columns if c != "section"]
    return combined[cols].to_csv(index=False)


def render(report: BoundReport, output_format: str, decimals: int = 6) -> str:
    if output_format == "json":
        return report.to_json()
    if output_format == "table":
        return render_table(report, decimals)
    if output_format == "csv":
        return render_csv(report, decimals)
    raise ParameterError(f"unknown output format {output_format!r}")


def save_report(report: BoundReport, path: str | Path, decimals: int = 6) -> Path:
    """Write the report; .xlsx gets one sheet per table, .csv/.txt the rendered text, anything else JSON."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".xlsx":
        with pd.ExcelWriter(path, engine="openpyxl") as writer:
            for name, frame in report_frames(report, decimals).items():
                frame.to_excel(writer, sheet_name=name, index=False)
    elif suffix == ".csv":
        path.write_text(render_csv(report, decimals), encoding="utf-8")
    elif suffix == ".txt":
        path.write_text(render_table(report, decimals), encoding="utf-8")
    else:
        path.write_text(report.to_json(), encoding="utf-8")
    logger.info("saved report to %s", path)
    return path
