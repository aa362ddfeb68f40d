"""
Soundness harness: generate matrices, compute every bound, check each claim
against the reference eigensolver and tally margins.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from tracebound.eigen_bounds import (
    all_eigs_disk,
    central_disks,
    max_central_k,
    moment_extremal_bounds,
    neighbor_disk,
    outer_circle,
    spread_upper_bounds,
    wolkowicz_styan_bounds,
)
from tracebound.ensembles import EnsembleSpec, generate
from tracebound.errors import ConvergenceError, ParameterError, TraceboundError
from tracebound.matrix_core import (
    DEFAULT_NORMAL_TOL,
    SpectralStats,
    centered,
    frobenius_norm_sq,
    is_normal,
    moment_upper_bound,
    spectral_stats,
    trace,
)
from tracebound.spectral_oracle import (
    DEFAULT_EIG_TOL,
    DEFAULT_SWEEPS_PER_ORDER,
    eigenvalues,
    verify_extremal,
    verify_region,
    verify_spread,
)
from tracebound.variance_kernel import (
    absolute_moment,
    complex_difference_bound,
    complex_order_statistic_bound,
    complex_stats,
    directional_projection_check,
    fahmy_prochan_bound,
    nagy_bound,
    order_statistic_bound,
    power_deviation_bound,
    real_stats,
    samuelson_bound,
    variance_slack,
    weighted_stats,
    weighted_variance_bound,
)

logger = logging.getLogger(__name__)

DEFAULT_SLACK = 1e-9
ORACLE_TOL = 1e-8
NORMAL_FORMULA_TOL = 1e-9
R_VALUES = (1, 2, 3)
DEFECT_SAFETY = 10.0

_EPS = float(np.finfo(float).eps)


def defect_tolerance(spec: EnsembleSpec, fro: float, eig_tol: float = DEFAULT_EIG_TOL) -> float:
    """
    Distance by which the reference eigenvalues of a real-spectrum family may
    be off their true values.

    The eigensolver returns the exact eigenvalues of A + E, where ||E|| is set
    by rounding (n eps ||A||_F) or by the deflation threshold (eig_tol ||A||_F),
    whichever is larger. With eta = 4 ||E|| (the 4 covers cond(S) <= 2 of the
    conjugating matrix) an eigenvalue of a Jordan block of size b moves by
    about eta^(1/b). For b = 1 this stays below the default claim slack.
    """
    backward = 4.0 * max(spec.n * _EPS, eig_tol) * (fro + 1.0)
    return DEFECT_SAFETY * backward ** (1.0 / spec.max_block)


@dataclass(frozen=True)
class ClaimFailure:
    description: str
    margin: float
    seed: int
    trial: int
    kind: str
    n: int


@dataclass(frozen=True)
class ConvergenceFailure:
    message: str
    seed: int
    trial: int
    kind: str
    n: int


@dataclass
class VerificationReport:
    claims_checked: int = 0
    failures: List[ClaimFailure] = field(default_factory=list)
    min_margin: float = math.inf
    convergence_failures: List[ConvergenceFailure] = field(default_factory=list)
    min_margin_by_check: Dict[str, float] = field(default_factory=dict)
    per_spec: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def merge(self, other: "VerificationReport") -> None:
        self.claims_checked += other.claims_checked
        self.failures.extend(other.failures)
        self.min_margin = min(self.min_margin, other.min_margin)
        self.convergence_failures.extend(other.convergence_failures)
        for check, margin in other.min_margin_by_check.items():
            self.min_margin_by_check[check] = min(margin, self.min_margin_by_check.get(check, math.inf))
        for label, row in other.per_spec.items():
            mine = self.per_spec.setdefault(label, _empty_spec_row())
            mine["trials"] += row["trials"]
            mine["claims_checked"] += row["claims_checked"]
            mine["failures"] += row["failures"]
            mine["convergence_failures"] += row["convergence_failures"]
            mine["min_margin"] = min(mine["min_margin"], row["min_margin"])

    def summary_frame(self) -> pd.DataFrame:
        """One row per ensemble spec, in the order the specs were run."""
        rows = [{"spec": label, **row} for label, row in self.per_spec.items()]
        columns = ["spec", "trials", "claims_checked", "failures", "convergence_failures", "min_margin"]
        return pd.DataFrame(rows, columns=columns)

    def checks_frame(self) -> pd.DataFrame:
        rows = [{"check": check, "min_margin": margin} for check, margin in sorted(self.min_margin_by_check.items())]
        return pd.DataFrame(rows, columns=["check", "min_margin"])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "claims_checked": self.claims_checked,
            "failures": [vars(f) for f in self.failures],
            "min_margin": _finite_or_none(self.min_margin),
            "convergence_failures": [vars(c) for c in self.convergence_failures],
            "min_margin_by_check": {k: _finite_or_none(v) for k, v in sorted(self.min_margin_by_check.items())},
            "per_spec": {
                label: {**row, "min_margin": _finite_or_none(row["min_margin"])} for label, row in self.per_spec.items()
            },
        }


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def _empty_spec_row() -> Dict[str, Any]:
    return {"trials": 0, "claims_checked": 0, "failures": 0, "convergence_failures": 0, "min_margin": math.inf}


class _TrialTally:
    """Collects the outcome of every check made on one generated matrix."""

    def __init__(self, spec: EnsembleSpec, trial: int) -> None:
        self.spec = spec
        self.trial = trial
        self.report = VerificationReport()
        self.row = _empty_spec_row()
        self.row["trials"] = 1
        self.report.per_spec[spec.label()] = self.row

    def record(self, check: str, description: str, passed: bool, margin: float) -> None:
        rep = self.report
        rep.claims_checked += 1
        self.row["claims_checked"] += 1
        rep.min_margin_by_check[check] = min(margin, rep.min_margin_by_check.get(check, math.inf))
        if passed:
            rep.min_margin = min(rep.min_margin, margin)
            self.row["min_margin"] = min(self.row["min_margin"], margin)
            return
        logger.warning("claim failed: %s (margin %.3e) on %s trial %d", description, margin, self.spec.label(), self.trial)
        self.row["failures"] += 1
        rep.failures.append(ClaimFailure(description, margin, self.spec.seed, self.trial, self.spec.kind, self.spec.n))

    def inequality(self, check: str, description: str, lhs: float, rhs: float, slack: float) -> None:
        """Record lhs <= rhs within slack."""
        margin = rhs - lhs
        self.record(check, description, margin >= -slack, margin)

    def error(self, check: str, description: str, exc: Exception) -> None:
        self.record(check, f"{description}: {type(exc).__name__}: {exc}", False, -math.inf)

    def convergence(self, exc: ConvergenceError) -> None:
        logger.warning("eigensolver did not converge on %s trial %d: %s", self.spec.label(), self.trial, exc)
        self.row["convergence_failures"] += 1
        self.report.convergence_failures.append(
            ConvergenceFailure(str(exc), self.spec.seed, self.trial, self.spec.kind, self.spec.n)
        )


def _check_sequence_lemmas(tally: _TrialTally, lam: np.ndarray, rng: np.random.Generator, slack_rel: float) -> None:
    """Variance inequalities on the eigenvalues viewed as plain sequences."""
    n = lam.size
    by_real = lam[np.lexsort((lam.imag, lam.real))]
    x = real_stats(by_real.real)
    z = complex_stats(by_real)
    tol = variance_slack(z.scale, slack_rel)

    for j in range(1, n + 1):
        tally.inequality("samuelson", f"samuelson j={j}", samuelson_bound(x, j), x.variance, tol)
    tally.inequality("nagy", "nagy", nagy_bound(x), x.variance, tol)

    pairs = {(1, n)}
    if n > 2:
        l = int(rng.integers(1, n))
        pairs.add((l, int(rng.integers(l + 1, n + 1))))
    for l, k in sorted(pairs):
        tally.inequality("fahmy_prochan", f"fahmy_prochan l={l} k={k}", fahmy_prochan_bound(x, l, k), x.variance, tol)
        diff = float(by_real.real[k - 1] - by_real.real[l - 1])
        rhs = complex_difference_bound(z, l, k, "real")
        tally.inequality("complex_difference", f"complex_difference real l={l} k={k}", diff * diff, rhs, tol)
        direction = complex(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))
        ok = directional_projection_check(lam, direction, l, k)
        tally.record("directional_projection", f"directional_projection l={l} k={k}", ok, 0.0 if ok else -math.inf)

    for k in range(1, max_central_k(n) + 1):
        low, high = order_statistic_bound(x, k)
        tally.inequality("order_statistic", f"order_statistic k={k}", max(low, high), x.variance, tol)
        direction = complex(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))
        low, high = complex_order_statistic_bound(z, k, "direction", direction)
        rhs = z.abs_variance + abs(z.complex_variance)
        tally.inequality("complex_order_statistic", f"complex_order_statistic k={k}", max(low, high), rhs, tol)

    weights = rng.dirichlet(np.ones(n))
    w = weighted_stats(x.values, weights / weights.sum())
    for j in range(1, n + 1):
        lhs = weighted_variance_bound(w, j)
        tally.inequality("weighted_variance", f"weighted_variance j={j}", lhs, w.weighted_variance, tol)

    for r in R_VALUES:
        moment = absolute_moment(z, r)
        r_tol = slack_rel * max(z.scale, 1.0) ** (2 * r)
        for j in range(1, n + 1):
            lhs = power_deviation_bound(z, j, r)
            tally.inequality("power_deviation", f"power_deviation j={j} r={r}", lhs, moment, r_tol)


def _check_regions(
    tally: _TrialTally,
    stats: SpectralStats,
    lam: np.ndarray,
    rng: np.random.Generator,
    slack: float,
) -> None:
    source = stats.abs_variance_source
    n = stats.effective_dim
    previous_radius = math.inf
    for k in range(1, max_central_k(n) + 1):
        disk, real_strip, imag_strip = central_disks(stats, k)
        for region in (disk, real_strip, imag_strip):
            ok, margin = verify_region(region, lam, slack)
            axis = getattr(region, "axis", "disk")
            tally.record(region.theorem, f"{region.theorem} k={k} {axis} [{source}]", ok, margin)
        tally.inequality("central_disk_nesting", f"central disk k={k} inside k={k - 1} [{source}]", disk.radius, previous_radius, slack)
        previous_radius = disk.radius

    pairs = {(1, n)}
    if n > 2:
        l = int(rng.integers(1, n))
        pairs.add((l, int(rng.integers(l + 1, n + 1))))
    for l, k in sorted(pairs):
        for bound in spread_upper_bounds(stats, l, k):
            if not bound.asserted:
                continue
            ok, margin = verify_spread(bound, lam, slack)
            tally.record("spread", f"spread {bound.pair_kind} l={l} k={k} [{source}]", ok, margin)

    known = complex(lam[int(rng.integers(0, lam.size))])
    for region in neighbor_disk(stats, known):
        ok, margin = verify_region(region, lam, slack)
        axis = getattr(region, "axis", "disk")
        tally.record(region.theorem, f"{region.theorem} {axis} [{source}]", ok, margin)


def _check_matrix(
    spec: EnsembleSpec,
    trial: int,
    slack_rel: float,
    normal_tol: float,
    eig_tol: float,
    sweeps_per_order: int,
) -> VerificationReport:
    tally = _TrialTally(spec, trial)
    a = generate(spec, trial)
    fro = math.sqrt(frobenius_norm_sq(a))
    slack = slack_rel * (fro + 1.0)
    rng = np.random.default_rng([spec.seed, trial, 1])

    try:
        spectrum = eigenvalues(a, eig_tol, sweeps_per_order)
    except ConvergenceError as exc:
        tally.convergence(exc)
        return tally.report
    lam = spectrum.eigenvalues

    real = spec.real_spectrum
    if real:
        # claims are checked on the real parts; the slack absorbs the split of defective blocks
        defect = defect_tolerance(spec, fro, eig_tol)
        drift = float(np.max(np.abs(lam.imag)))
        tally.inequality("real_axis_drift", "reference eigenvalues near the real axis", drift, defect, 0.0)
        slack += defect

    oracle_tol = ORACLE_TOL * (fro + 1.0)
    tally.inequality("oracle_trace", "sum of eigenvalues equals trA", abs(complex(np.sum(lam)) - trace(a)), oracle_tol, 0.0)
    tr_sq = complex(np.trace(a.power(2).entries))
    tally.inequality(
        "oracle_trace_sq",
        "sum of squared eigenvalues equals trA^2",
        abs(complex(np.sum(lam * lam)) - tr_sq),
        ORACLE_TOL * (fro + 1.0) ** 2,
        0.0,
    )
    if real:
        lam = lam.real.astype(complex)

    _check_sequence_lemmas(tally, lam, rng, slack_rel)

    normal = is_normal(a, normal_tol)
    variants = [
        spectral_stats(a, "oracle", spectrum=lam, real_spectrum=real),
        spectral_stats(a, "upper_bound", real_spectrum=real),
    ]
    if normal:
        by_formula = spectral_stats(a, "normal_formula", real_spectrum=real, normal_tol=normal_tol)
        tally.inequality(
            "normal_formula_cross_check",
            "normal-formula S_lambda^2 matches oracle",
            abs(by_formula.abs_variance - variants[0].abs_variance),
            NORMAL_FORMULA_TOL * (fro + 1.0) ** 2,
            0.0,
        )
        variants.append(by_formula)
    for stats in variants:
        _check_regions(tally, stats, lam, rng, slack)

    b = centered(a)
    dev = lam - b.shift
    for r in R_VALUES:
        r_slack = slack_rel * (fro + 1.0) ** (2 * r)
        oracle_moment = float(np.sum(np.abs(dev) ** (2 * r)))
        upper = moment_upper_bound(b, r)
        tally.inequality("moment_upper_bound", f"moment upper bound r={r}", oracle_moment, upper, r_slack)
        for label, moment in (("oracle", oracle_moment), ("upper_bound", upper)):
            ok, margin = verify_region(all_eigs_disk(b, r, moment), lam, slack)
            tally.record("all_eigenvalues_disk", f"all eigenvalues disk r={r} [{label}]", ok, margin)
        if normal:
            ok, margin = verify_region(outer_circle(b, r, normal_tol), lam, slack)
            tally.record("outer_circle", f"outer circle r={r}", ok, margin)

    if real:
        stats = variants[1]
        tr_b2 = max(b.effective_power_trace(2).real, 0.0)
        try:
            bounds = [wolkowicz_styan_bounds(stats, tr_b2)]
            for r in R_VALUES:
                tr_b2r = max(b.effective_power_trace(2 * r).real, 0.0)
                bounds.append(moment_extremal_bounds(stats, tr_b2, tr_b2r, r))
        except TraceboundError as exc:
            tally.error("extremal", "extremal bounds", exc)
            bounds = []
        for bound in bounds:
            ok, margin = verify_extremal(bound, lam, slack)
            tally.record(bound.method, f"{bound.method} extremal bounds", ok, margin)
    return tally.report


def run_suite(
    specs: Sequence[EnsembleSpec],
    trials_per_spec: int,
    slack: float = DEFAULT_SLACK,
    workers: int = 1,
    normal_tol: float = DEFAULT_NORMAL_TOL,
    eig_tol: float = DEFAULT_EIG_TOL,
    sweeps_per_order: int = DEFAULT_SWEEPS_PER_ORDER,
) -> VerificationReport:
    """
    Check every bound on `trials_per_spec` matrices from each spec.

    Parameters
    ----------
    specs : sequence of EnsembleSpec
        Matrix families; trial t of a spec is generate(spec, t).
    trials_per_spec : int
        Matrices per family, at least 1.
    slack : float
        Relative slack; each matrix uses slack * (||A||_F + 1).
    workers : int
        Trials run on a thread pool of this size; results are merged in trial
        order, so the report does not depend on it.
    eig_tol, sweeps_per_order : float, int
        Reference eigensolver settings; a trial that does not converge is
        recorded as a convergence failure, not a claim failure.
    """
    if trials_per_spec < 1:
        raise ParameterError(f"trials_per_spec must be at least 1, got {trials_per_spec}")
    if slack < 0:
        raise ParameterError(f"slack must be non-negative, got {slack}")
    tasks: List[Tuple[EnsembleSpec, int]] = [(spec, t) for spec in specs for t in range(trials_per_spec)]

    def run(task: Tuple[EnsembleSpec, int]) -> VerificationReport:
        return _check_matrix(task[0], task[1], slack, normal_tol, eig_tol, sweeps_per_order)

    report = VerificationReport()
    for spec in specs:
        report.per_spec.setdefault(spec.label(), _empty_spec_row())
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results: Iterable[VerificationReport] = list(pool.map(run, tasks))
    else:
        results = map(run, tasks)
    for partial in results:
        report.merge(partial)
    logger.info(
        "checked %d claims on %d matrices: %d failures, %d convergence failures",
        report.claims_checked,
        len(tasks),
        len(report.failures),
        len(report.convergence_failures),
    )
    return report
