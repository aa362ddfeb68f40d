import json
import math

import pandas as pd
import pytest

from tracebound.analysis import AnalysisConfig, BoundReport, analyze, render, report_frames, save_report
from tracebound.ensembles import EnsembleSpec
from tracebound.errors import ParameterError
from tracebound.matrix_core import ComplexMatrix
from tracebound.matrix_io import write_matrix

NUMERIC_TOL = 5e-4


def _assert_matches(actual, expected, path="$"):
    if isinstance(expected, bool) or expected is None or isinstance(expected, str):
        assert actual == expected, path
    elif isinstance(expected, (int, float)):
        assert isinstance(actual, (int, float)) and not isinstance(actual, bool), path
        assert actual == pytest.approx(expected, abs=NUMERIC_TOL), path
    elif isinstance(expected, list):
        assert isinstance(actual, list) and len(actual) == len(expected), path
        for i, (a, e) in enumerate(zip(actual, expected)):
            _assert_matches(a, e, f"{path}[{i}]")
    else:
        assert isinstance(actual, dict), path
        assert sorted(actual) == sorted(expected), path
        for key in expected:
            _assert_matches(actual[key], expected[key], f"{path}.{key}")


def test_sample_report_matches_golden(data_dir, golden_dir):
    report = analyze(AnalysisConfig(input_path=str(data_dir / "sample_4x4.json")))
    actual = json.loads(report.to_json())
    actual["provenance"]["config"]["input_path"] = "sample_4x4.json"
    expected = json.loads((golden_dir / "sample_report.json").read_text())
    _assert_matches(actual, expected)


@pytest.mark.parametrize("name", ["sample_4x4.mtx", "sample_4x4.csv"])
def test_every_sample_format_gives_the_same_bounds(data_dir, name):
    reference = analyze(AnalysisConfig(input_path=str(data_dir / "sample_4x4.json"))).to_dict()
    other = analyze(AnalysisConfig(input_path=str(data_dir / name))).to_dict()
    assert other["regions"] == reference["regions"]
    assert other["extremal_bounds"] == reference["extremal_bounds"]


def test_sample_report_verifies(data_dir):
    report = analyze(AnalysisConfig(input_path=str(data_dir / "sample_4x4.json"), verify=True))
    assert report.all_verified
    claims = report.verification["claims"]
    assert len(claims) == len(report.regions) + 3 + 3
    assert all(c["passed"] for c in claims)
    eigs = report.verification["eigenvalues"]
    assert sum(re for re, _ in eigs) == pytest.approx(22.0, abs=1e-9)


def test_identity_gives_zero_radii(tmp_path):
    path = write_matrix(ComplexMatrix.identity(3), tmp_path / "identity.json")
    report = analyze(AnalysisConfig(input_path=str(path), verify=True))
    assert all(getattr(r, "radius", getattr(r, "half_width", None)) == pytest.approx(0.0, abs=1e-12) for r in report.regions)
    assert report.all_verified


def test_rank_override_report(tmp_path):
    path = write_matrix(ComplexMatrix.diagonal([3.0, 5.0, 0.0, 0.0]), tmp_path / "low_rank.json")
    report = analyze(AnalysisConfig(input_path=str(path), rank_override=2, verify=True))
    assert report.stats["effective_dim"] == 2
    assert report.stats["mean"] == [4.0, 0.0]
    disk = report.regions[0]
    assert disk.radius == pytest.approx(1.0)
    ws = report.extremal_bounds[0]
    assert (ws.lower_bound_on_max, ws.upper_bound_on_min) == (pytest.approx(5.0), pytest.approx(3.0))
    assert report.all_verified


def test_non_normal_input_skips_gated_theorems():
    config = AnalysisConfig(ensemble=EnsembleSpec("ginibre", 8, seed=42), verify=True)
    report = analyze(config)
    assert report.stats["abs_variance_source"] == "upper_bound"
    assert [s["theorem"] for s in report.skipped] == ["outer_circle", "outer_circle", "extremal_bounds"]
    assert report.extremal_bounds == []
    assert report.matrix["source"] == "ensemble:ginibre"
    assert report.all_verified


def test_ensemble_report_is_byte_identical_on_repeat():
    config = AnalysisConfig(ensemble=EnsembleSpec("ginibre", 8, seed=42), seed=42)
    assert analyze(config).to_json() == analyze(config).to_json()


def test_oracle_mode_and_known_eigenvalues(data_dir):
    config = AnalysisConfig(
        input_path=str(data_dir / "sample_4x4.json"), s_lambda_mode="oracle", known=(5.5,), k_values=(2,), verify=True
    )
    report = analyze(config)
    assert report.stats["abs_variance_source"] == "oracle"
    assert report.stats["abs_variance"] == pytest.approx(8.25, abs=1e-9)
    theorems = [r.theorem for r in report.regions]
    assert theorems[:6] == ["central_disk", "central_strip", "central_strip", "neighbor_disk", "neighbor_strip", "neighbor_strip"]
    assert report.all_verified


def test_complex_known_eigenvalue_on_normal_matrix(tmp_path):
    w = complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3))
    path = write_matrix(ComplexMatrix.diagonal([1.0, w, w.conjugate()]), tmp_path / "roots.json")
    report = analyze(AnalysisConfig(input_path=str(path), known=(1.0,), verify=True))
    neighbor = next(r for r in report.regions if r.theorem == "neighbor_disk")
    assert neighbor.radius == pytest.approx(math.sqrt(3))
    assert report.all_verified


def test_one_by_one_matrix_skips_neighbor_disks(tmp_path):
    path = write_matrix(ComplexMatrix.diagonal([2.0]), tmp_path / "one.json")
    report = analyze(AnalysisConfig(input_path=str(path), known=(2.0,), verify=True))
    assert report.spread_bounds == []
    assert {s["theorem"] for s in report.skipped} == {"neighbor_disk", "extremal_bounds"}
    assert report.all_verified


def test_invalid_configs(data_dir):
    sample = str(data_dir / "sample_4x4.json")
    with pytest.raises(ParameterError):
        analyze(AnalysisConfig())
    with pytest.raises(ParameterError):
        analyze(AnalysisConfig(input_path=sample, ensemble=EnsembleSpec("ginibre", 3, seed=0)))
    with pytest.raises(ParameterError):
        analyze(AnalysisConfig(input_path=sample, s_lambda_mode="exact"))
    with pytest.raises(ParameterError):
        analyze(AnalysisConfig(input_path=sample, r_values=(0,)))
    with pytest.raises(ParameterError):
        analyze(AnalysisConfig(input_path=sample, k_values=(3,)))


def test_report_round_trip(data_dir):
    report = analyze(AnalysisConfig(input_path=str(data_dir / "sample_4x4.json"), known=(3 + 1j,), verify=True))
    data = json.loads(report.to_json())
    assert json.loads(BoundReport.from_dict(data).to_json()) == data


def test_table_and_csv_rendering(data_dir):
    report = analyze(AnalysisConfig(input_path=str(data_dir / "sample_4x4.json"), verify=True))
    table = render(report, "table")
    assert "== regions ==" in table
    assert "central_disk" in table
    assert "== eigenvalues ==" in table
    csv_text = render(report, "csv")
    assert csv_text.splitlines()[0].startswith("section,theorem")
    assert "wolkowicz_styan" in csv_text
    with pytest.raises(ParameterError):
        render(report, "yaml")


def test_save_report_formats(data_dir, tmp_path):
    report = analyze(AnalysisConfig(input_path=str(data_dir / "sample_4x4.json")))
    xlsx = save_report(report, tmp_path / "report.xlsx")
    sheets = pd.read_excel(xlsx, sheet_name=None)
    assert set(sheets) == set(report_frames(report))
    assert len(sheets["regions"]) == len(report.regions)
    saved = save_report(report, tmp_path / "report.json")
    assert json.loads(saved.read_text()) == json.loads(report.to_json())
    assert "== stats ==" in save_report(report, tmp_path / "report.txt").read_text()


def test_sample_report_with_second_moment_extremal_bounds(data_dir):
    report = analyze(AnalysisConfig(input_path=str(data_dir / "sample_4x4.json"), r_values=(2,), verify=True))
    bounds = {b.method: (b.lower_bound_on_max, b.upper_bound_on_min) for b in report.extremal_bounds}
    assert set(bounds) == {"wolkowicz_styan", "moment_r2"}
    assert bounds["wolkowicz_styan"] == (pytest.approx(7.1583, abs=5e-4), pytest.approx(3.8417, abs=5e-4))
    assert bounds["moment_r2"] == (pytest.approx(7.2586, abs=5e-4), pytest.approx(3.7414, abs=5e-4))
    assert report.all_verified
