# core/utils/linalg.py
"""Dense linear algebra shared by the problem, homotopy and solver modules.

Pseudo-inverses of Gram matrices A^T D A drop eigenvalues below 1e-12 times
the largest one. Bases of A itself cut singular values at the square root of
that, 1e-6 times the largest, so both see the same numerical row space.
"""

import math
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse

RCOND = 1e-12
ROW_RCOND = math.sqrt(RCOND)


def to_dense(A) -> np.ndarray:
    """Return A as a dense ndarray"""
    if scipy.sparse.issparse(A):
        return A.toarray()
    return np.asarray(A, dtype=float)


def scale_rows(A, weights: np.ndarray):
    """diag(weights) @ A, preserving sparse storage"""
    if scipy.sparse.issparse(A):
        return scipy.sparse.csr_matrix(A.multiply(weights[:, None]))
    return A * weights[:, None]


def gram(A, D: Optional[np.ndarray] = None) -> np.ndarray:
    """Dense d x d matrix A^T diag(D) A"""
    if D is None:
        M = A.T @ A
    else:
        M = A.T @ scale_rows(A, D)
    M = to_dense(M)
    return 0.5 * (M + M.T)


def psd_eigh(M: np.ndarray, rcond: float = RCOND) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric PSD matrix above the relative cutoff"""
    if M.size == 0:
        return np.zeros(0), np.zeros((M.shape[0], 0))
    w, V = scipy.linalg.eigh(M)
    top = float(np.max(np.abs(w))) if w.size else 0.0
    if top <= 0.0:
        return np.zeros(0), np.zeros((M.shape[0], 0))
    keep = w > rcond * top
    return w[keep], V[:, keep]


def pinv_psd(M: np.ndarray, rcond: float = RCOND) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a symmetric PSD matrix"""
    w, V = psd_eigh(M, rcond)
    return (V / w) @ V.T


def pinv_sqrt_psd(M: np.ndarray, rcond: float = RCOND) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ((M^+)^{1/2}, (M^{1/2}) restricted to range, range basis)"""
    w, V = psd_eigh(M, rcond)
    root = np.sqrt(w)
    return (V / root) @ V.T, (V * root) @ V.T, V


def row_space_basis(A, rcond: float = ROW_RCOND) -> np.ndarray:
    """Orthonormal basis (d x r) of the row space of A"""
    dense = to_dense(A)
    if dense.size == 0:
        return np.zeros((dense.shape[1], 0))
    _, sigma, Vt = scipy.linalg.svd(dense, full_matrices=False)
    if sigma.size == 0 or sigma[0] <= 0.0:
        return np.zeros((dense.shape[1], 0))
    keep = sigma > rcond * sigma[0]
    return Vt[keep].T


def numerical_rank(A, rcond: float = ROW_RCOND) -> int:
    return row_space_basis(A, rcond).shape[1]
