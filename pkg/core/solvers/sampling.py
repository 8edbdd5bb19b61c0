# core/solvers/sampling.py
"""Leverage scores and leverage-score row sampling for the sketched preconditioner."""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse

from .preconditioner import SketchedPreconditioner, build_dense, build_sketched, spectral_bounds
from ..utils.linalg import gram, pinv_psd, scale_rows
from ..utils.logger import setup_logger

logger = setup_logger('sampling')

LOWER_SPECTRAL_BOUND = 0.5
UPPER_SPECTRAL_BOUND = 2.0


def leverage_scores(A, D: np.ndarray) -> np.ndarray:
    """Diagonal of sqrt(D) A (A^T D A)^+ A^T sqrt(D)"""
    M_pinv = pinv_psd(gram(A, D))
    B = scale_rows(A, np.sqrt(D))
    BM = np.asarray(B @ M_pinv)
    if scipy.sparse.issparse(B):
        tau = np.asarray(B.multiply(BM).sum(axis=1)).ravel()
    else:
        tau = np.einsum('ij,ij->i', B, BM)
    return np.clip(tau, 0.0, 1.0)


def sample_size(d: int, oversample: float = 4.0) -> int:
    """m = ceil(8 d ln(max(d, 2)) oversample)"""
    return int(math.ceil(8.0 * d * math.log(max(d, 2)) * oversample))


def sparsify(A, D: np.ndarray, seed: int, oversample: float = 4.0,
             tau: Optional[np.ndarray] = None) -> Tuple[np.ndarray, bool]:
    """
    Sample rows with replacement proportionally to their leverage scores and
    reweight so that E[A^T W A] = A^T D A; then verify
    (1/2) A^T D A <= A^T W A <= 2 A^T D A on range(A^T D A).
    """
    n, d = A.shape
    tau = leverage_scores(A, D) if tau is None else tau
    total = float(tau.sum())
    if total <= 0.0:
        return D.copy(), True

    m = sample_size(d, oversample)
    prob = tau / total
    rng = np.random.default_rng(seed)
    draws = rng.choice(n, size=m, replace=True, p=prob)
    counts = np.bincount(draws, minlength=n)

    W = np.zeros(n)
    hit = counts > 0
    W[hit] = counts[hit] * D[hit] / (m * prob[hit])

    lo, hi = spectral_bounds(A, D, W)
    accepted = lo >= LOWER_SPECTRAL_BOUND and hi <= UPPER_SPECTRAL_BOUND
    return W, accepted


@dataclass
class SketchOutcome:
    preconditioner: SketchedPreconditioner
    W: np.ndarray
    attempts: int
    fell_back: bool


def sketch_preconditioner(A, D: np.ndarray, seed: int, oversample: float = 4.0,
                          retries: int = 8, tau: Optional[np.ndarray] = None) -> SketchOutcome:
    """Sparsify with up to `retries` seeds, falling back to the exact W = D"""
    tau = leverage_scores(A, D) if tau is None else tau
    for attempt in range(retries):
        W, accepted = sparsify(A, D, seed + attempt, oversample, tau=tau)
        if accepted:
            if attempt:
                logger.info(f"Sparsifier accepted after {attempt + 1} attempts")
            return SketchOutcome(build_sketched(A, W), W, attempt + 1, False)

    logger.warning(f"Sparsifier rejected {retries} times; falling back to W = D")
    W = D.copy()
    return SketchOutcome(build_sketched(A, W), W, retries, True)


def verify_sparsifier(A, D: np.ndarray, W: np.ndarray) -> Tuple[float, float]:
    """Generalized eigenvalue range of (A^T W A, A^T D A)"""
    return spectral_bounds(A, D, W, build_dense(A, D))
