# core/problem/lp_problem.py

from dataclasses import dataclass
from typing import Dict, Union

import numpy as np
import scipy.sparse

from ..utils.exceptions import DimensionError, ParameterError
from ..utils.linalg import row_space_basis
from ..utils.logger import setup_logger
from ..utils.validators import Validators

logger = setup_logger('lp_problem')

# Matrices below this fraction of stored nonzeros are kept in CSR form
SPARSE_DENSITY_THRESHOLD = 0.25
ROWSPACE_TOLERANCE = 1e-8

Matrix = Union[np.ndarray, scipy.sparse.csr_matrix]


def choose_storage(A) -> Matrix:
    """Store A densely or as CSR depending on its fill ratio"""
    n, d = A.shape
    nnz = A.nnz if scipy.sparse.issparse(A) else int(np.count_nonzero(A))
    density = nnz / float(max(n * d, 1))
    if density < SPARSE_DENSITY_THRESHOLD:
        out = scipy.sparse.csr_matrix(A, dtype=float)
        out.sort_indices()
        return out
    if scipy.sparse.issparse(A):
        return A.toarray().astype(float)
    return np.array(A, dtype=float)


def project_to_rowspace(A, c: np.ndarray) -> np.ndarray:
    """Orthogonal projection of c onto the row space of A"""
    c = np.asarray(c, dtype=float).ravel()
    if A.shape[1] != c.shape[0]:
        raise DimensionError(f"c has length {c.shape[0]} but A has {A.shape[1]} columns", obj='c')
    V = row_space_basis(A)
    if V.shape[1] == 0:
        return np.zeros_like(c)
    return V @ (V.T @ c)


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class LpProblem:
    """Instance of min_x c.x + ||Ax - b||_p^p"""
    A: Matrix
    b: np.ndarray
    c: np.ndarray
    p: float

    def __post_init__(self):
        if not Validators.validate_exponent(self.p):
            raise ParameterError(f"p must be finite and > 1, got {self.p}")
        if len(self.A.shape) != 2:
            raise DimensionError("A must be a matrix", obj='A')
        n, d = self.A.shape
        if n < 1 or d < 1:
            raise DimensionError(f"A must have at least one row and one column, got {n}x{d}", obj='A')
        if self.b.shape != (n,):
            raise DimensionError(f"b has length {self.b.shape[0]} but A has {n} rows", obj='b')
        if self.c.shape != (d,):
            raise DimensionError(f"c has length {self.c.shape[0]} but A has {d} columns", obj='c')

    @classmethod
    def create(cls, A, b, c, p: float, project: bool = True) -> 'LpProblem':
        """Build a validated instance; c is projected onto row-space(A) when needed"""
        if not Validators.validate_exponent(p):
            raise ParameterError(f"p must be finite and > 1, got {p}")
        if scipy.sparse.issparse(A):
            A = scipy.sparse.csr_matrix(A, dtype=float)
        else:
            A = np.atleast_2d(np.asarray(A, dtype=float))
        A = choose_storage(A)
        b = np.asarray(b, dtype=float).ravel().copy()
        c = np.asarray(c, dtype=float).ravel().copy()

        if b.shape[0] != A.shape[0]:
            raise DimensionError(f"b has length {b.shape[0]} but A has {A.shape[0]} rows", obj='b')
        if c.shape[0] != A.shape[1]:
            raise DimensionError(f"c has length {c.shape[0]} but A has {A.shape[1]} columns", obj='c')
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ParameterError("b and c must be finite")

        if project:
            projected = project_to_rowspace(A, c)
            c_norm = float(np.linalg.norm(c))
            residual = float(np.linalg.norm(c - projected))
            if residual > ROWSPACE_TOLERANCE * max(c_norm, 1e-300):
                logger.warning(
                    f"c is not in the row space of A (residual {residual:.3e}); using its projection"
                )
            c = projected

        if not scipy.sparse.issparse(A):
            _freeze(A)
        return cls(A=A, b=_freeze(b), c=_freeze(c), p=float(p))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    @property
    def nnz(self) -> int:
        if scipy.sparse.issparse(self.A):
            return int(self.A.nnz)
        return int(np.count_nonzero(self.A))

    @property
    def is_sparse(self) -> bool:
        return scipy.sparse.issparse(self.A)

    def residual(self, x: np.ndarray) -> np.ndarray:
        """s = Ax - b"""
        return np.asarray(self.A @ x).ravel() - self.b

    def rows(self, index: np.ndarray) -> Matrix:
        """Rows of A selected by index (repeats allowed)"""
        return self.A[index]

    def summary(self) -> Dict:
        return {
            'n': self.n,
            'd': self.d,
            'p': self.p,
            'nnz': self.nnz,
            'storage': 'csr' if self.is_sparse else 'dense',
        }


def objective(problem: LpProblem, x: np.ndarray) -> float:
    """c.x + sum_i |(Ax - b)_i|^p"""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != problem.d:
        raise DimensionError(f"x has length {x.shape[0]} but the problem has d={problem.d}", obj='x')
    s = problem.residual(x)
    return float(problem.c @ x) + float(np.sum(np.abs(s) ** problem.p))
