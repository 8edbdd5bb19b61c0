# core/solvers/preconditioner.py
"""
Change of variables x = P y for the phase objective.

Three variants share one interface:
    dense     P = ((A^T D A)^+)^(1/2), explicit d x d matrix, y in R^d
    factored  P' = (A^T D A)^+ A^T sqrt(D), applied through a retained factorization, y in R^n
    sketched  P'' = (A^T W A)^+ A^T sqrt(W), W a sampled diagonal, y in R^m (m = nnz(W))
In every case P^T A^T D A P (P^T A^T W A P for the sketch) is the orthogonal
projection Q onto the range of the variable y.
"""

from abc import ABC, abstractmethod
from typing import Callable, Optional

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from ..utils.linalg import gram, pinv_psd, pinv_sqrt_psd, scale_rows
from ..utils.logger import setup_logger

logger = setup_logger('preconditioner')

SINGULAR_PIVOT_RATIO = 1e-12


class Preconditioner(ABC):
    kind: str = ''

    @property
    @abstractmethod
    def dim(self) -> int:
        """Dimension of the preconditioned variable y"""

    @abstractmethod
    def apply(self, y: np.ndarray) -> np.ndarray:
        """x = P y"""

    @abstractmethod
    def apply_transpose(self, v: np.ndarray) -> np.ndarray:
        """P^T v"""

    @abstractmethod
    def preimage(self, x: np.ndarray) -> np.ndarray:
        """Minimum-norm y with P y = x, for x in the row space of A"""

    @abstractmethod
    def project(self, y: np.ndarray) -> np.ndarray:
        """Orthogonal projection Q y onto the range of the variable"""

    def as_matrix(self) -> np.ndarray:
        """Explicit d x dim matrix of P (diagnostics only)"""
        return np.column_stack([self.apply(e) for e in np.eye(self.dim)])


class DensePreconditioner(Preconditioner):
    kind = 'dense'

    def __init__(self, P: np.ndarray, P_root: np.ndarray, basis: np.ndarray, M: np.ndarray):
        self.P = P
        self.P_root = P_root
        self.basis = basis
        self.M = M

    @property
    def dim(self) -> int:
        return self.P.shape[0]

    def apply(self, y):
        return self.P @ y

    def apply_transpose(self, v):
        return self.P @ v

    def preimage(self, x):
        return self.P_root @ x

    def project(self, y):
        return self.basis @ (self.basis.T @ y)

    def as_matrix(self):
        return self.P.copy()


class FactoredPreconditioner(Preconditioner):
    kind = 'factored'

    def __init__(self, A, sqrt_d: np.ndarray, solve: Callable[[np.ndarray], np.ndarray], exact: bool = True):
        self.A = A
        self.sqrt_d = sqrt_d
        self._solve = solve
        self.exact = exact

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def solve(self, v: np.ndarray) -> np.ndarray:
        """(A^T D A)^+ v"""
        return self._solve(v)

    def apply(self, z):
        return self.solve(np.asarray(self.A.T @ (self.sqrt_d * z)).ravel())

    def apply_transpose(self, v):
        return self.sqrt_d * np.asarray(self.A @ self.solve(v)).ravel()

    def preimage(self, x):
        return self.sqrt_d * np.asarray(self.A @ x).ravel()

    def project(self, z):
        return self.sqrt_d * np.asarray(self.A @ self.apply(z)).ravel()


class SketchedPreconditioner(Preconditioner):
    kind = 'sketched'

    def __init__(self, rows: np.ndarray, A_rows, sqrt_w: np.ndarray, M_pinv: np.ndarray, n: int):
        self.rows = rows
        self.A_rows = A_rows
        self.sqrt_w = sqrt_w
        self.M_pinv = M_pinv
        self.n = n

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    @property
    def weights(self) -> np.ndarray:
        """The sampled diagonal W as a dense n-vector"""
        W = np.zeros(self.n)
        W[self.rows] = self.sqrt_w ** 2
        return W

    def apply(self, y):
        return self.M_pinv @ np.asarray(self.A_rows.T @ (self.sqrt_w * y)).ravel()

    def apply_transpose(self, v):
        return self.sqrt_w * np.asarray(self.A_rows @ (self.M_pinv @ v)).ravel()

    def preimage(self, x):
        return self.sqrt_w * np.asarray(self.A_rows @ x).ravel()

    def project(self, y):
        return self.sqrt_w * np.asarray(self.A_rows @ self.apply(y)).ravel()


def build_dense(A, D: np.ndarray) -> DensePreconditioner:
    """P = ((A^T D A)^+)^(1/2) by symmetric eigendecomposition"""
    M = gram(A, D)
    P, P_root, basis = pinv_sqrt_psd(M)
    return DensePreconditioner(P, P_root, basis, M)


def _lsqr_solver(M) -> Callable[[np.ndarray], np.ndarray]:
    d = M.shape[0]

    def solve(v):
        result = scipy.sparse.linalg.lsqr(M, v, atol=1e-14, btol=1e-14, conlim=1e16, iter_lim=50 * max(d, 10))
        return result[0]

    return solve


def build_factored(A, D: np.ndarray) -> FactoredPreconditioner:
    """
    Retain a factorization of A^T D A so that P' and P'^T are applied by linear solves.

    Dense A uses a Cholesky factor, CSR A a sparse LU. A (numerically) singular
    system falls back to LSQR, which returns the minimum-norm solution.
    """
    sqrt_d = np.sqrt(D)
    try:
        if scipy.sparse.issparse(A):
            M = scipy.sparse.csc_matrix(A.T @ scale_rows(A, D))
            lu = scipy.sparse.linalg.splu(M)
            pivots = np.abs(lu.U.diagonal())
            if pivots.size == 0 or pivots.min() <= SINGULAR_PIVOT_RATIO * pivots.max():
                raise np.linalg.LinAlgError("near-singular pivot in sparse LU")
            return FactoredPreconditioner(A, sqrt_d, lu.solve)

        M = gram(A, D)
        factor = scipy.linalg.cho_factor(M, lower=True)
        pivots = np.abs(np.diag(factor[0])) ** 2
        if pivots.min() <= SINGULAR_PIVOT_RATIO * pivots.max():
            raise np.linalg.LinAlgError("near-singular pivot in Cholesky factor")
        return FactoredPreconditioner(A, sqrt_d, lambda v: scipy.linalg.cho_solve(factor, v))

    except (np.linalg.LinAlgError, RuntimeError, ValueError) as e:
        logger.warning(f"Factorization of A^T D A failed ({e}); using LSQR with pseudo-inverse semantics")
        M = scipy.sparse.csr_matrix(gram(A, D)) if scipy.sparse.issparse(A) else gram(A, D)
        return FactoredPreconditioner(A, sqrt_d, _lsqr_solver(M), exact=False)


def build_sketched(A, W: np.ndarray) -> SketchedPreconditioner:
    """P'' = (A^T W A)^+ A^T sqrt(W) with (A^T W A)^+ stored densely"""
    rows = np.flatnonzero(W > 0)
    A_rows = A[rows]
    if scipy.sparse.issparse(A_rows):
        A_rows = scipy.sparse.csr_matrix(A_rows)
    w = W[rows]
    M_pinv = pinv_psd(gram(A_rows, w))
    return SketchedPreconditioner(rows, A_rows, np.sqrt(w), M_pinv, A.shape[0])


def spectral_bounds(A, D: np.ndarray, W: np.ndarray, dense: Optional[DensePreconditioner] = None):
    """Extreme generalized eigenvalues of (A^T W A, A^T D A) on range(A^T D A)"""
    dense = dense or build_dense(A, D)
    basis = dense.basis
    if basis.shape[1] == 0:
        return 1.0, 1.0
    MW = gram(A, W)
    K = basis.T @ (dense.P @ MW @ dense.P) @ basis
    eig = scipy.linalg.eigvalsh(0.5 * (K + K.T))
    return float(eig.min()), float(eig.max())
