# core/problem/matrix_market.py

import os
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np
import scipy.io
import scipy.sparse

from .lp_problem import LpProblem
from ..utils.exceptions import DimensionError, MatrixMarketParseError, ParameterError
from ..utils.logger import setup_logger
from ..utils.validators import Validators

logger = setup_logger('matrix_market')

PathLike = Union[str, Path]

SUPPORTED_FORMATS = ('coordinate', 'array')


def _data_lines(lines: List[str], start: int) -> List[Tuple[int, str]]:
    """Non-blank, non-comment lines from `start` on, with 1-based line numbers"""
    out = []
    for idx in range(start, len(lines)):
        text = lines[idx].strip()
        if text and not text.startswith('%'):
            out.append((idx + 1, text))
    return out


def _check_banner(path: str, lines: List[str]) -> str:
    if not lines:
        raise MatrixMarketParseError("empty file", path, 1)
    tokens = lines[0].strip().lower().split()
    if len(tokens) != 5 or tokens[0] != '%%matrixmarket' or tokens[1] != 'matrix':
        raise MatrixMarketParseError("missing '%%MatrixMarket matrix' header", path, 1)
    fmt, field, symmetry = tokens[2], tokens[3], tokens[4]
    if fmt not in SUPPORTED_FORMATS:
        raise MatrixMarketParseError(f"unsupported format '{fmt}'", path, 1)
    if field not in ('real', 'integer', 'double'):
        raise MatrixMarketParseError(f"unsupported field '{field}', expected real", path, 1)
    if symmetry != 'general':
        raise MatrixMarketParseError(f"unsupported symmetry '{symmetry}', expected general", path, 1)
    return fmt


def _parse_float(path: str, line_no: int, token: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MatrixMarketParseError(f"cannot parse '{token}' as a real number", path, line_no)
    if not np.isfinite(value):
        raise MatrixMarketParseError(f"non-finite value '{token}'", path, line_no)
    return value


def _parse_int(path: str, line_no: int, token: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise MatrixMarketParseError(f"cannot parse '{token}' as an integer", path, line_no)


def _scan_body(path: str, fmt: str, body: List[Tuple[int, str]]) -> Tuple[int, int]:
    """Check the size line and every entry line before handing the file to scipy"""
    if not body:
        raise MatrixMarketParseError("missing size line", path, None)
    size_line, size_text = body[0]
    sizes = size_text.split()
    expected = 3 if fmt == 'coordinate' else 2
    if len(sizes) != expected:
        raise MatrixMarketParseError(f"size line needs {expected} integers", path, size_line)
    rows, cols = _parse_int(path, size_line, sizes[0]), _parse_int(path, size_line, sizes[1])
    if rows < 1 or cols < 1:
        raise MatrixMarketParseError("matrix dimensions must be positive", path, size_line)

    entries = body[1:]
    if fmt == 'coordinate':
        declared = _parse_int(path, size_line, sizes[2])
        for line_no, text in entries:
            tokens = text.split()
            if len(tokens) != 3:
                raise MatrixMarketParseError("coordinate entry needs 'row col value'", path, line_no)
            i, j = _parse_int(path, line_no, tokens[0]), _parse_int(path, line_no, tokens[1])
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise MatrixMarketParseError(f"index ({i}, {j}) outside {rows}x{cols}", path, line_no)
            _parse_float(path, line_no, tokens[2])
    else:
        declared = rows * cols
        for line_no, text in entries:
            tokens = text.split()
            if len(tokens) != 1:
                raise MatrixMarketParseError("array entry needs a single value", path, line_no)
            _parse_float(path, line_no, tokens[0])

    if len(entries) != declared:
        last = entries[-1][0] if entries else size_line
        raise MatrixMarketParseError(f"expected {declared} entries, found {len(entries)}", path, last)
    return rows, cols


def read_matrix(path: PathLike):
    """Read a real general Matrix Market file (coordinate or array)"""
    path = str(path)
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise MatrixMarketParseError(f"cannot read file: {e}", path, None)

    fmt = _check_banner(path, lines)
    rows, cols = _scan_body(path, fmt, _data_lines(lines, 1))

    try:
        matrix = scipy.io.mmread(path)
    except Exception as e:
        raise MatrixMarketParseError(f"scipy could not read the matrix: {e}", path, None)

    if scipy.sparse.issparse(matrix):
        matrix = scipy.sparse.csr_matrix(matrix, dtype=float)
    else:
        matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (rows, cols):
        raise MatrixMarketParseError(f"read shape {matrix.shape}, header says {(rows, cols)}", path, None)
    return matrix


def read_vector(path: PathLike) -> np.ndarray:
    """Read newline-separated reals; blank lines are ignored"""
    path = str(path)
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise MatrixMarketParseError(f"cannot read file: {e}", path, None)

    values = []
    for idx, raw in enumerate(lines):
        text = raw.strip()
        if not text:
            continue
        if len(text.split()) != 1:
            raise MatrixMarketParseError("expected one value per line", path, idx + 1)
        values.append(_parse_float(path, idx + 1, text))
    return np.array(values, dtype=float)


def load_problem(matrix_path: PathLike, b_path: PathLike, c_path: PathLike, p: float) -> LpProblem:
    """Load and validate an instance from Matrix Market + text vector files"""
    if not Validators.validate_exponent(p):
        raise ParameterError(f"p must be finite and > 1, got {p}")
    try:
        A = read_matrix(matrix_path)
        b = read_vector(b_path)
        c = read_vector(c_path)

        n, d = A.shape
        if b.shape[0] != n:
            raise DimensionError(f"b has {b.shape[0]} entries but A has {n} rows", obj='b')
        if c.shape[0] != d:
            raise DimensionError(f"c has {c.shape[0]} entries but A has {d} columns", obj='c')

        problem = LpProblem.create(A, b, c, p)
        logger.info(f"Loaded problem n={problem.n} d={problem.d} nnz={problem.nnz} from {matrix_path}")
        return problem

    except Exception as e:
        logger.error(f"Error loading problem from {matrix_path}: {e}")
        raise


def write_vector(path: PathLike, vector: np.ndarray):
    """Write one real per line with round-trip precision"""
    np.savetxt(str(path), np.asarray(vector, dtype=float).ravel(), fmt='%.17g')


def resolve_prefix(prefix: PathLike) -> Dict[str, Path]:
    """Output paths for A.mtx, b.txt and c.txt under a directory or file-name prefix"""
    prefix = str(prefix)
    base = Path(prefix)
    if base.is_dir() or prefix.endswith(os.sep) or prefix.endswith('/'):
        return {'A': base / 'A.mtx', 'b': base / 'b.txt', 'c': base / 'c.txt'}
    return {
        'A': base.parent / f"{base.name}A.mtx",
        'b': base.parent / f"{base.name}b.txt",
        'c': base.parent / f"{base.name}c.txt",
    }


def write_problem(problem: LpProblem, prefix: PathLike) -> Dict[str, Path]:
    """Write A (Matrix Market, real general), b and c; returns the paths"""
    paths = resolve_prefix(prefix)
    try:
        paths['A'].parent.mkdir(parents=True, exist_ok=True)
        A = problem.A
        if scipy.sparse.issparse(A):
            A = scipy.sparse.coo_matrix(A)
        scipy.io.mmwrite(str(paths['A']), A, field='real', precision=17, symmetry='general')
        write_vector(paths['b'], problem.b)
        write_vector(paths['c'], problem.c)
        logger.info(f"Wrote problem files {paths['A']}, {paths['b']}, {paths['c']}")
        return paths

    except Exception as e:
        logger.error(f"Error writing problem to {prefix}: {e}")
        raise
