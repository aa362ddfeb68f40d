import numpy as np
import pytest

from tracebound.ensembles import KINDS, EnsembleSpec, generate
from tracebound.errors import ParameterError
from tracebound.matrix_core import is_hermitian, is_normal, spectral_stats
from tracebound.spectral_oracle import eigenvalues


@pytest.mark.parametrize("kind", KINDS)
def test_generation_is_deterministic(kind):
    spec = EnsembleSpec(kind, 5, seed=7)
    first = generate(spec, 3)
    second = generate(spec, 3)
    assert np.array_equal(first.entries, second.entries)
    assert not np.array_equal(first.entries, generate(spec, 4).entries)


def test_hermitian_and_normal_kinds_pass_their_gates():
    for trial in range(3):
        assert is_hermitian(generate(EnsembleSpec("hermitian", 6, seed=1), trial))
        assert is_normal(generate(EnsembleSpec("normal", 6, seed=1), trial))
        assert not is_normal(generate(EnsembleSpec("jordan_defective", 6, seed=1), trial))


def test_normal_formula_matches_oracle_on_normal_matrices():
    for trial in range(5):
        a = generate(EnsembleSpec("normal", 7, seed=9), trial)
        formula = spectral_stats(a, "normal_formula")
        spectrum = eigenvalues(a)
        oracle = spectral_stats(a, "oracle", spectrum=spectrum)
        assert formula.abs_variance == pytest.approx(oracle.abs_variance, rel=1e-9, abs=1e-12)
        bare = spectral_stats(a, "oracle", spectrum=list(spectrum.eigenvalues))
        assert bare.abs_variance == oracle.abs_variance


def test_diagonal_values_are_used_verbatim():
    spec = EnsembleSpec("diagonal", 4, seed=0, values=(0, 0, 0, 4))
    a = generate(spec)
    assert np.array_equal(np.diag(a.entries), [0, 0, 0, 4])
    assert spec.real_spectrum
    assert not EnsembleSpec("diagonal", 2, seed=0, values=(1j, 0)).real_spectrum


def test_jordan_kind_has_real_defective_spectrum():
    a = generate(EnsembleSpec("jordan_defective", 6, seed=4), 0)
    lam = eigenvalues(a).eigenvalues
    # a size-3 block splits its eigenvalue by about eps**(1/3)
    assert np.max(np.abs(lam.imag)) <= 1e-4


def test_max_block():
    assert EnsembleSpec("jordan_defective", 6, seed=0).max_block == 3
    assert EnsembleSpec("jordan_defective", 2, seed=0).max_block == 2
    assert EnsembleSpec("hermitian", 6, seed=0).max_block == 1


def test_label():
    assert EnsembleSpec("ginibre", 8, seed=42).label() == "ginibre(n=8, seed=42)"


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="wishart", n=4, seed=0),
        dict(kind="ginibre", n=1, seed=0),
        dict(kind="ginibre", n=4, seed=-1),
        dict(kind="ginibre", n=4, seed=0, scale=0.0),
        dict(kind="ginibre", n=2, seed=0, values=(1, 2)),
        dict(kind="diagonal", n=3, seed=0, values=(1, 2)),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(ParameterError):
        EnsembleSpec(**kwargs)


def test_negative_trial_rejected():
    with pytest.raises(ParameterError):
        generate(EnsembleSpec("ginibre", 3, seed=0), -1)
