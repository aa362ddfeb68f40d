import dataclasses
import math

import numpy as np
import pytest

from tracebound.eigen_bounds import (
    Claim,
    Disk,
    all_eigs_disk,
    central_disks,
    moment_extremal_bounds,
    neighbor_disk,
    outer_circle,
    region_from_dict,
    spread_upper_bounds,
    wolkowicz_styan_bounds,
)
from tracebound.errors import ConsistencyError, DegenerateSizeError, IndexRangeError, ModeError, ParameterError
from tracebound.matrix_core import ComplexMatrix, centered, moment_upper_bound, spectral_stats
from tracebound.spectral_oracle import eigenvalues, verify_extremal, verify_region


@pytest.fixture
def sample_stats(sample_matrix):
    return spectral_stats(sample_matrix, "normal_formula")


def test_sample_central_disks(sample_stats):
    disk, real_strip, imag_strip = central_disks(sample_stats, 1)
    assert disk.center == 5.5
    assert disk.radius == pytest.approx(math.sqrt(24.75))
    assert disk.claim == Claim("contains_at_least", count=4)
    assert real_strip.half_width == pytest.approx(math.sqrt(24.75))
    assert imag_strip.half_width == pytest.approx(0.0, abs=1e-6)
    assert "Huang-Wang" in disk.notes[0]

    disk2, _, _ = central_disks(sample_stats, 2)
    assert disk2.radius == pytest.approx(math.sqrt(8.25))
    assert disk2.claim.count == 2
    assert disk2.notes == ()


def test_central_k_range(sample_stats):
    with pytest.raises(ParameterError):
        central_disks(sample_stats, 3)
    with pytest.raises(ParameterError):
        central_disks(sample_stats, 0)


def test_central_disks_are_nested_and_monotone(sample_stats):
    radii = [central_disks(sample_stats, k)[0].radius for k in (1, 2)]
    assert radii[1] <= radii[0]
    wider = dataclasses.replace(sample_stats, abs_variance=sample_stats.abs_variance * 2)
    assert central_disks(wider, 2)[0].radius >= radii[1]


def test_sample_spread(sample_stats):
    real_parts, imag_parts, modulus = spread_upper_bounds(sample_stats, 1, 4)
    assert real_parts.upper == pytest.approx(math.sqrt(66))
    assert imag_parts.upper == pytest.approx(0.0, abs=1e-6)
    assert modulus.upper == pytest.approx(math.sqrt(66))
    assert modulus.asserted
    assert not spread_upper_bounds(sample_stats, 1, 3)[2].asserted
    with pytest.raises(IndexRangeError):
        spread_upper_bounds(sample_stats, 2, 2)


def test_sample_all_eigs_disks(sample_matrix, sample_stats):
    b = centered(sample_matrix)
    r1 = all_eigs_disk(b, 1, moment_upper_bound(b, 1))
    assert r1.radius == pytest.approx(math.sqrt(24.75))
    assert r1.claim.kind == "contains_all"
    r2 = all_eigs_disk(b, 2, moment_upper_bound(b, 2))
    assert r2.radius == pytest.approx((27 / 28 * 502.25) ** 0.25, abs=1e-9)
    assert r2.radius == pytest.approx(4.691173, abs=5e-6)


def test_hermitian_all_eigs_r1_matches_central_k1(sample_matrix, sample_stats):
    b = centered(sample_matrix)
    assert all_eigs_disk(b, 1, moment_upper_bound(b, 1)).radius == pytest.approx(
        central_disks(sample_stats, 1)[0].radius, rel=1e-12
    )


def test_all_eigs_disk_rejects_bad_input(sample_matrix):
    b = centered(sample_matrix)
    with pytest.raises(ParameterError):
        all_eigs_disk(b, 1, -1.0)
    with pytest.raises(ParameterError):
        all_eigs_disk(b, 0, 1.0)


def test_rank_override_weakens_contains_all():
    a = ComplexMatrix.diagonal([3.0, 5.0, 0.0])
    b = centered(a, 2)
    disk = all_eigs_disk(b, 1, moment_upper_bound(b, 1))
    assert disk.claim == Claim("contains_at_least", count=2)
    assert disk.center == 4.0
    assert disk.radius == pytest.approx(1.0)


def test_sample_outer_circles(sample_matrix):
    b = centered(sample_matrix)
    r1 = outer_circle(b, 1)
    assert r1.radius == pytest.approx(math.sqrt(8.25))
    assert r1.parameters["stated_radius"] == pytest.approx(math.sqrt(33))
    assert r1.claim.kind == "at_least_one_on_or_outside"
    assert outer_circle(b, 2).radius == pytest.approx((502.25 / 4) ** 0.25)


def test_outer_circle_needs_normal_matrix():
    b = centered(ComplexMatrix.from_rows([[0, 1], [0, 0]]))
    with pytest.raises(ModeError):
        outer_circle(b, 1)


def test_sample_extremal_bounds(sample_matrix, sample_stats):
    ws = wolkowicz_styan_bounds(sample_stats, 33.0)
    assert ws.lower_bound_on_max == pytest.approx(7.1583, abs=5e-4)
    assert ws.upper_bound_on_min == pytest.approx(3.8417, abs=5e-4)
    assert ws.method == "wolkowicz_styan"

    r2 = moment_extremal_bounds(sample_stats, 33.0, 502.25, 2)
    assert r2.lower_bound_on_max == pytest.approx(7.2586, abs=5e-4)
    assert r2.upper_bound_on_min == pytest.approx(3.7414, abs=5e-4)
    assert r2.method == "moment_r2"
    assert r2.lower_bound_on_max > ws.lower_bound_on_max


def test_moment_r1_is_wolkowicz_styan(sample_stats):
    ws = wolkowicz_styan_bounds(sample_stats, 33.0)
    r1 = moment_extremal_bounds(sample_stats, 33.0, 33.0, 1)
    assert r1.lower_bound_on_max == pytest.approx(ws.lower_bound_on_max, rel=1e-14)
    assert r1.upper_bound_on_min == pytest.approx(ws.upper_bound_on_min, rel=1e-14)


def test_extremal_edge_cases(sample_stats, cube_roots):
    flat = moment_extremal_bounds(sample_stats, 0.0, 0.0, 2)
    assert flat.lower_bound_on_max == flat.upper_bound_on_min == 5.5
    with pytest.raises(ConsistencyError):
        moment_extremal_bounds(sample_stats, 1.0, 0.0, 2)
    with pytest.raises(ParameterError):
        wolkowicz_styan_bounds(sample_stats, -1.0)
    complex_stats = spectral_stats(cube_roots, "normal_formula")
    with pytest.raises(ModeError):
        wolkowicz_styan_bounds(complex_stats, 1.0)
    single = spectral_stats(ComplexMatrix.diagonal([2.0]), "normal_formula")
    with pytest.raises(DegenerateSizeError):
        wolkowicz_styan_bounds(single, 0.0)


def test_complex_spectrum_widens_central_disk(cube_roots):
    w = np.exp(2j * np.pi / 3)
    spectrum = [1.0, w, w * w]
    stats = spectral_stats(cube_roots, "normal_formula")
    disk, _, _ = central_disks(stats, 2)
    assert disk.parameters["theorem_radius"] == pytest.approx(0.5)
    assert disk.radius == pytest.approx(1.0)
    assert disk.notes
    ok, margin = verify_region(disk, spectrum, 1e-9)
    assert ok
    assert margin == pytest.approx(0.0, abs=1e-9)


def test_complex_spectrum_widens_neighbor_disk(cube_roots):
    w = np.exp(2j * np.pi / 3)
    stats = spectral_stats(cube_roots, "normal_formula")
    disk, real_strip, imag_strip = neighbor_disk(stats, 1.0)
    assert disk.parameters["theorem_radius"] == pytest.approx(1.5)
    assert disk.radius == pytest.approx(math.sqrt(3))
    for region in (disk, real_strip, imag_strip):
        assert verify_region(region, [1.0, w, w * w], 1e-9)[0]


def test_real_spectrum_neighbor_disk_is_not_widened(sample_stats):
    disk, _, _ = neighbor_disk(sample_stats, 5.5)
    expected = 4 / math.sqrt(6) * math.sqrt(16.5)
    assert disk.radius == pytest.approx(expected)
    assert disk.notes == ()


def test_neighbor_disk_needs_two_eigenvalues():
    single = spectral_stats(ComplexMatrix.diagonal([2.0]), "normal_formula")
    with pytest.raises(DegenerateSizeError):
        neighbor_disk(single, 2.0)


def test_regions_round_trip(sample_matrix, sample_stats):
    b = centered(sample_matrix)
    regions = list(central_disks(sample_stats, 2)) + list(neighbor_disk(sample_stats, 3 + 1j)) + [outer_circle(b, 2)]
    for region in regions:
        assert region_from_dict(region.to_dict()) == region
    assert isinstance(region_from_dict(regions[0].to_dict()), Disk)


def test_two_point_extremal_bounds_are_tight():
    stats = spectral_stats(ComplexMatrix.diagonal([0.0, 4.0]), "normal_formula")
    ws = wolkowicz_styan_bounds(stats, 8.0)
    assert ws.lower_bound_on_max == pytest.approx(4.0, abs=1e-12)
    assert ws.upper_bound_on_min == pytest.approx(0.0, abs=1e-12)


def test_samuelson_witness_outer_circle_and_moment_bound():
    a = ComplexMatrix.diagonal([0.0, 0.0, 0.0, 4.0])
    b = centered(a)
    circle = outer_circle(b, 1)
    assert circle.center == 1.0
    assert circle.radius == pytest.approx(math.sqrt(3))
    ok, margin = verify_region(circle, [0, 0, 0, 4], 1e-9)
    assert ok
    assert margin == pytest.approx(3 - math.sqrt(3))

    stats = spectral_stats(a, "normal_formula")
    r2 = moment_extremal_bounds(stats, 12.0, 84.0, 2)
    assert r2.lower_bound_on_max == pytest.approx(2.0)
    assert r2.upper_bound_on_min == pytest.approx(0.0, abs=1e-12)
    assert verify_extremal(r2, [0, 0, 0, 4], 1e-9)[0]


def test_neighbor_disk_around_smallest_sample_eigenvalue(sample_matrix, sample_stats):
    lam = eigenvalues(sample_matrix).sorted_values()
    disk, real_strip, imag_strip = neighbor_disk(sample_stats, complex(lam[0].real))
    assert disk.radius == pytest.approx(4 / math.sqrt(6) * math.sqrt(16.5))
    assert disk.radius == pytest.approx(6.633, abs=5e-4)
    for region in (disk, real_strip, imag_strip):
        assert verify_region(region, lam, 1e-9)[0]
