from pathlib import Path

import numpy as np
import pytest

from tracebound.matrix_core import ComplexMatrix

DATA_DIR = Path(__file__).resolve().parent.parent / "tracebound" / "data"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

SAMPLE_ROWS = [[4, 0, 2, 3], [0, 5, 0, 1], [2, 0, 6, 0], [3, 1, 0, 7]]


@pytest.fixture
def sample_matrix() -> ComplexMatrix:
    return ComplexMatrix.from_rows(SAMPLE_ROWS)


@pytest.fixture
def cube_roots() -> ComplexMatrix:
    """diag(1, w, w^2): S^2 = 0 while S_lambda^2 = 1."""
    w = np.exp(2j * np.pi / 3)
    return ComplexMatrix.diagonal([1.0, w, w * w])


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN_DIR
