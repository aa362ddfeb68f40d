"""
Reading and writing square complex matrices.

Formats
-------
matrix_market : ``%%MatrixMarket matrix array|coordinate real|complex|integer|pattern
                general|symmetric|skew-symmetric|hermitian``; arrays are column-major.
json          : ``{"n": 3, "entries": [[re, im], ...]}`` with n*n pairs, row-major.
csv           : n rows of n tokens, each a real number or ``a+bi``.
"""

from __future__ import annotations

import io
import json
import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pandas.errors import EmptyDataError, ParserError

from tracebound.errors import MatrixParseError, ParameterError, ShapeError
from tracebound.matrix_core import MAX_ORDER, ComplexMatrix

logger = logging.getLogger(__name__)

FORMAT_ALIASES = {"mm": "matrix_market", "mtx": "matrix_market", "matrix_market": "matrix_market", "json": "json", "csv": "csv"}
SUFFIX_FORMATS = {".mtx": "matrix_market", ".mm": "matrix_market", ".json": "json", ".csv": "csv"}

_MM_FIELDS = ("real", "complex", "integer", "pattern")
_MM_SYMMETRIES = ("general", "symmetric", "skew-symmetric", "hermitian")


def resolve_format(path: str | Path, fmt: Optional[str] = None) -> str:
    """Canonical format name from an explicit alias or the file suffix."""
    if fmt is not None:
        try:
            return FORMAT_ALIASES[fmt.lower()]
        except KeyError:
            raise ParameterError(f"unknown matrix format {fmt!r}; expected mm, json or csv") from None
    suffix = Path(path).suffix.lower()
    if suffix not in SUFFIX_FORMATS:
        raise ParameterError(f"cannot infer the matrix format of {path}; pass --format")
    return SUFFIX_FORMATS[suffix]


def parse_complex_token(token: str, line: Optional[int] = None, column: Optional[int] = None) -> complex:
    """Parse ``3``, ``-1.5e2``, ``2-0.5i``, ``i`` or ``-4i``."""
    text = token.strip().replace(" ", "")
    if not text:
        raise MatrixParseError("empty entry", line, column)
    if text[-1] in "ij":
        body = text[:-1]
        # complex() needs an explicit magnitude on a bare unit imaginary
        if body == "" or body[-1] in "+-":
            body += "1"
        text = body + "j"
    try:
        return complex(text)
    except ValueError:
        raise MatrixParseError(f"cannot parse entry {token!r}", line, column) from None


def format_complex_token(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def _check_order(n: int, max_order: int) -> None:
    if n > max_order:
        raise ParameterError(f"matrix order {n} exceeds the supported maximum {max_order}")


def _read_text(path: Path) -> str:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise MatrixParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw.count(b"\n", 0, exc.start) + 1
        column = exc.start - (raw.rfind(b"\n", 0, exc.start) + 1) + 1
        raise MatrixParseError(f"{path} is not valid UTF-8: {exc.reason}", line, column) from exc


def _parse_json(path: Path, max_order: int) -> ComplexMatrix:
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise MatrixParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(data, dict) or "n" not in data or "entries" not in data:
        raise MatrixParseError('JSON matrix must be an object with "n" and "entries"')
    n = data["n"]
    entries = data["entries"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MatrixParseError(f'"n" must be a positive integer, got {n!r}')
    _check_order(n, max_order)
    if not isinstance(entries, list):
        raise MatrixParseError('"entries" must be a list of [re, im] pairs')
    if len(entries) != n * n:
        rows, extra = divmod(len(entries), n)
        raise ShapeError(n, rows + (1 if extra else 0), f"expected {n * n} entries for n={n}, got {len(entries)}")
    values = np.empty(n * n, dtype=complex)
    for idx, pair in enumerate(entries):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
        ):
            raise MatrixParseError(f"entry {idx} (row {idx // n + 1}, column {idx % n + 1}) must be [re, im], got {pair!r}")
        try:
            values[idx] = complex(pair[0], pair[1])
        except OverflowError:
            raise MatrixParseError(f"entry {idx} (row {idx // n + 1}, column {idx % n + 1}) is too large for a float") from None
    return ComplexMatrix(values.reshape(n, n))


def _parse_csv(path: Path, max_order: int) -> ComplexMatrix:
    text = _read_text(path)
    try:
        frame = pd.read_csv(io.StringIO(text), header=None, dtype=str, keep_default_na=False, skipinitialspace=True)
    except EmptyDataError as exc:
        raise MatrixParseError(f"{path} is empty") from exc
    except ParserError as exc:
        found = re.search(r"line (\d+)", str(exc))
        raise MatrixParseError(f"ragged CSV rows: {exc}", int(found.group(1)) if found else None) from exc

    rows, cols = frame.shape
    _check_order(max(rows, cols), max_order)
    values = np.empty((rows, cols), dtype=complex)
    for i, record in enumerate(frame.itertuples(index=False, name=None)):
        for j, token in enumerate(record):
            if not isinstance(token, str) or token.strip() == "":
                raise MatrixParseError("missing entry", i + 1, j + 1)
            values[i, j] = parse_complex_token(token, i + 1, j + 1)
    if rows != cols:
        raise ShapeError(rows, cols)
    return ComplexMatrix(values)


def _mm_lines(text: str) -> List[Tuple[int, List[str]]]:
    """(1-based line number, tokens) for every non-comment, non-blank line after the banner."""
    out = []
    for number, raw in enumerate(text.splitlines(), start=1):
        if number == 1:
            continue
        stripped = raw.strip()
        if not stripped or stripped.startswith("%"):
            continue
        out.append((number, stripped.split()))
    return out


def _mm_value(tokens: List[str], field: str, line: int, first_col: int) -> complex:
    width = {"real": 1, "integer": 1, "complex": 2, "pattern": 0}[field]
    if len(tokens) != width:
        raise MatrixParseError(f"expected {width} value(s) for a {field} entry, got {len(tokens)}", line, first_col)
    if field == "pattern":
        return 1.0 + 0j
    try:
        if field == "integer":
            return complex(int(tokens[0]))
        if field == "real":
            return complex(float(tokens[0]))
        return complex(float(tokens[0]), float(tokens[1]))
    except ValueError:
        raise MatrixParseError(f"cannot parse {' '.join(tokens)!r} as {field}", line, first_col) from None
    except OverflowError:
        raise MatrixParseError(f"{' '.join(tokens)!r} is too large for a float", line, first_col) from None


def _mirror(values: np.ndarray, i: int, j: int, symmetry: str) -> None:
    if i == j:
        return
    if symmetry == "symmetric":
        values[j, i] = values[i, j]
    elif symmetry == "skew-symmetric":
        values[j, i] = -values[i, j]
    elif symmetry == "hermitian":
        values[j, i] = values[i, j].conjugate()


def _parse_matrix_market(path: Path, max_order: int) -> ComplexMatrix:
    text = _read_text(path)
    banner = text.splitlines()[0].split() if text else []
    if len(banner) != 5 or banner[0].lower() != "%%matrixmarket" or banner[1].lower() != "matrix":
        raise MatrixParseError("expected '%%MatrixMarket matrix <layout> <field> <symmetry>' banner", 1, 1)
    layout, field, symmetry = (token.lower() for token in banner[2:])
    if layout not in ("array", "coordinate"):
        raise MatrixParseError(f"unknown layout {layout!r}", 1)
    if field not in _MM_FIELDS:
        raise MatrixParseError(f"unknown field {field!r}", 1)
    if symmetry not in _MM_SYMMETRIES:
        raise MatrixParseError(f"unknown symmetry {symmetry!r}", 1)
    if field == "pattern" and layout == "array":
        raise MatrixParseError("pattern matrices must use the coordinate layout", 1)
    if symmetry == "hermitian" and field != "complex":
        raise MatrixParseError("hermitian symmetry needs the complex field", 1)

    lines = _mm_lines(text)
    if not lines:
        raise MatrixParseError("missing size line", 2)
    size_line, size = lines[0]
    expected = 2 if layout == "array" else 3
    if len(size) != expected or not all(tok.isdigit() for tok in size):
        raise MatrixParseError(f"size line must hold {expected} non-negative integers", size_line, 1)
    rows, cols = int(size[0]), int(size[1])
    if rows != cols or rows == 0:
        raise ShapeError(rows, cols)
    n = rows
    _check_order(n, max_order)
    values = np.zeros((n, n), dtype=complex)
    body = lines[1:]

    if layout == "array":
        if symmetry == "general":
            positions = [(i, j) for j in range(n) for i in range(n)]
        elif symmetry == "skew-symmetric":
            positions = [(i, j) for j in range(n) for i in range(j + 1, n)]
        else:
            positions = [(i, j) for j in range(n) for i in range(j, n)]
        if len(body) != len(positions):
            where = body[len(positions)][0] if len(body) > len(positions) else None
            raise MatrixParseError(f"expected {len(positions)} array entries, got {len(body)}", where)
        for (line, tokens), (i, j) in zip(body, positions):
            values[i, j] = _mm_value(tokens, field, line, 1)
            _mirror(values, i, j, symmetry)
        return ComplexMatrix(values)

    nnz = int(size[2])
    if len(body) != nnz:
        where = body[nnz][0] if len(body) > nnz else None
        raise MatrixParseError(f"expected {nnz} coordinate entries, got {len(body)}", where)
    seen: Dict[Tuple[int, int], int] = {}
    for line, tokens in body:
        if len(tokens) < 2:
            raise MatrixParseError("coordinate entry needs a row and a column index", line, 1)
        try:
            i, j = int(tokens[0]) - 1, int(tokens[1]) - 1
        except ValueError:
            raise MatrixParseError("row and column indices must be integers", line, 1) from None
        if not (0 <= i < n and 0 <= j < n):
            raise MatrixParseError(f"index ({i + 1}, {j + 1}) outside a {n}x{n} matrix", line, 1)
        if symmetry == "skew-symmetric" and i == j:
            raise MatrixParseError("skew-symmetric matrices have no diagonal entries", line, 1)
        key = (min(i, j), max(i, j)) if symmetry != "general" else (i, j)
        if key in seen:
            raise MatrixParseError(f"duplicate entry for ({i + 1}, {j + 1}), first given on line {seen[key]}", line, 1)
        seen[key] = line
        values[i, j] = _mm_value(tokens[2:], field, line, 3)
        _mirror(values, i, j, symmetry)
    return ComplexMatrix(values)


_READERS = {"matrix_market": _parse_matrix_market, "json": _parse_json, "csv": _parse_csv}


def parse_matrix(path: str | Path, fmt: Optional[str] = None, max_order: int = MAX_ORDER) -> ComplexMatrix:
    """
    Read a square complex matrix.

    Parameters
    ----------
    path : str or Path
        Input file.
    fmt : {"mm", "matrix_market", "json", "csv"}, optional
        Inferred from the suffix (.mtx, .mm, .json, .csv) when omitted.
    max_order : int
        Largest accepted order, checked against the declared size before any
        storage is allocated.

    Raises
    ------
    MatrixParseError
        Malformed content, with line and column where known.
    ShapeError
        The matrix is not square.
    ParameterError
        The order exceeds `max_order`.
    MatrixValidationError
        An entry is NaN or infinite.
    """
    path = Path(path)
    name = resolve_format(path, fmt)
    matrix = _READERS[name](path, max_order)
    logger.debug("read %dx%d matrix from %s (%s)", matrix.order, matrix.order, path, name)
    return matrix


def write_matrix(a: ComplexMatrix, path: str | Path, fmt: Optional[str] = None) -> Path:
    """Write `a` in the given format; floats are written with repr so reading back is exact."""
    path = Path(path)
    name = resolve_format(path, fmt)
    entries = a.entries
    n = a.order
    if name == "json":
        pairs = [[float(z.real), float(z.imag)] for z in entries.reshape(-1)]
        path.write_text(json.dumps({"n": n, "entries": pairs}) + "\n", encoding="utf-8")
    elif name == "csv":
        tokens = pd.DataFrame([[format_complex_token(z) for z in row] for row in entries])
        tokens.to_csv(path, header=False, index=False)
    else:
        is_real = bool(np.all(entries.imag == 0))
        lines = [f"%%MatrixMarket matrix array {'real' if is_real else 'complex'} general", f"{n} {n}"]
        for z in entries.T.reshape(-1):
            lines.append(repr(float(z.real)) if is_real else f"{float(z.real)!r} {float(z.imag)!r}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
