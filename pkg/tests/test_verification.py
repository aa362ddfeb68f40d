import math

import pytest

from tracebound.ensembles import EnsembleSpec
from tracebound.errors import ParameterError
from tracebound.verification import DEFAULT_SLACK, VerificationReport, defect_tolerance, run_suite


def _assert_sound(report: VerificationReport) -> None:
    assert report.failures == [], [f.description for f in report.failures[:5]]
    assert report.convergence_failures == []
    assert report.claims_checked > 0


def test_samuelson_witness_is_tight():
    spec = EnsembleSpec("diagonal", 4, seed=0, values=(0, 0, 0, 4))
    report = run_suite([spec], 1)
    _assert_sound(report)
    assert report.min_margin_by_check["samuelson"] == pytest.approx(0.0, abs=1e-9)
    assert report.min_margin == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("kind", ["hermitian", "normal", "ginibre", "jordan_defective", "diagonal"])
def test_small_ensembles_are_sound(kind):
    report = run_suite([EnsembleSpec(kind, 5, seed=3)], 4)
    _assert_sound(report)
    assert report.per_spec[f"{kind}(n=5, seed=3)"]["trials"] == 4


def test_real_spectrum_specs_check_extremal_bounds():
    report = run_suite([EnsembleSpec("hermitian", 4, seed=1)], 2)
    assert {"wolkowicz_styan", "moment_r1", "moment_r2", "moment_r3"} <= set(report.min_margin_by_check)
    ginibre = run_suite([EnsembleSpec("ginibre", 4, seed=1)], 2)
    assert "wolkowicz_styan" not in ginibre.min_margin_by_check


def test_normal_matrices_get_formula_cross_check_and_outer_circle():
    report = run_suite([EnsembleSpec("normal", 6, seed=8)], 3)
    _assert_sound(report)
    assert "normal_formula_cross_check" in report.min_margin_by_check
    assert "outer_circle" in report.min_margin_by_check


def test_suite_is_deterministic_and_independent_of_workers():
    specs = [EnsembleSpec("ginibre", 6, seed=42), EnsembleSpec("hermitian", 5, seed=42)]
    serial = run_suite(specs, 3)
    again = run_suite(specs, 3)
    threaded = run_suite(specs, 3, workers=4)
    assert serial.to_dict() == again.to_dict()
    assert serial.to_dict() == threaded.to_dict()


def test_report_frames_and_dict():
    report = run_suite([EnsembleSpec("hermitian", 3, seed=0)], 2)
    summary = report.summary_frame()
    assert list(summary["spec"]) == ["hermitian(n=3, seed=0)"]
    assert int(summary["trials"].iloc[0]) == 2
    assert not report.checks_frame().empty
    data = report.to_dict()
    assert data["claims_checked"] == report.claims_checked
    assert math.isfinite(data["min_margin"])


def test_invalid_suite_arguments():
    with pytest.raises(ParameterError):
        run_suite([EnsembleSpec("ginibre", 3, seed=0)], 0)
    with pytest.raises(ParameterError):
        run_suite([EnsembleSpec("ginibre", 3, seed=0)], 1, slack=-1.0)


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["hermitian", "normal", "ginibre", "jordan_defective"])
@pytest.mark.parametrize("n", [4, 8, 16])
def test_thousand_trials_per_ensemble(kind, n):
    _assert_sound(run_suite([EnsembleSpec(kind, n, seed=2024)], 1000, workers=4))


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["hermitian", "ginibre"])
def test_odd_order_central_disk_cardinality(kind):
    report = run_suite([EnsembleSpec(kind, 9, seed=99)], 1000, workers=4)
    _assert_sound(report)
    assert "central_disk" in report.min_margin_by_check
    assert report.min_margin_by_check["central_disk_nesting"] >= 0.0


@pytest.mark.slow
def test_normal_formula_cross_check_at_scale():
    report = run_suite([EnsembleSpec("normal", 8, seed=7)], 1000, workers=4)
    _assert_sound(report)
    assert report.min_margin_by_check["normal_formula_cross_check"] >= 0.0


def test_convergence_failures_are_not_claim_failures():
    report = run_suite([EnsembleSpec("ginibre", 5, seed=0)], 3, sweeps_per_order=0)
    assert report.failures == []
    assert len(report.convergence_failures) == 3
    assert report.per_spec["ginibre(n=5, seed=0)"]["convergence_failures"] == 3


def test_defect_tolerance_grows_with_block_size():
    hermitian = defect_tolerance(EnsembleSpec("hermitian", 8, seed=0), 10.0)
    jordan = defect_tolerance(EnsembleSpec("jordan_defective", 4, seed=0), 5.0)
    assert hermitian < DEFAULT_SLACK
    assert 1e-6 < jordan < 1e-2
    assert defect_tolerance(EnsembleSpec("jordan_defective", 4, seed=0), 5.0, eig_tol=1e-9) > jordan


def test_defective_spectra_are_checked_on_the_real_axis():
    report = run_suite([EnsembleSpec("jordan_defective", 4, seed=2024)], 50)
    _assert_sound(report)
    assert report.min_margin_by_check["real_axis_drift"] > 0.0
    ginibre = run_suite([EnsembleSpec("ginibre", 4, seed=2024)], 2)
    assert "real_axis_drift" not in ginibre.min_margin_by_check


@pytest.mark.slow
def test_defective_spectra_at_order_four():
    report = run_suite([EnsembleSpec("jordan_defective", 4, seed=2024)], 1000, workers=4)
    _assert_sound(report)
    assert report.per_spec["jordan_defective(n=4, seed=2024)"]["failures"] == 0
