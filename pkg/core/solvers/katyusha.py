# core/solvers/katyusha.py
"""
Mini-batch Katyusha on the sketched phase objective.

The phase objective is split as g(y) = sum_i F_i(y) with
    F_i(y) = (1/n) c.P'' y + tilde-f_i(a_i.P'' y - b_i)
so the split sums exactly to g. A step samples |S| = batch rows with
replacement and touches only those rows of A plus O(d^2) dense work.
"""

import copy
import math
from typing import List, Optional, Tuple

import numpy as np

from .agd import NOISE_FLOOR, STALL_FLOOR, gap_certified
from .base_solver import BaseSolver, PhaseSolution, SolverKind
from .objective import PreconditionedObjective
from .preconditioner import Preconditioner
from .sampling import LOWER_SPECTRAL_BOUND, leverage_scores, sketch_preconditioner
from ..problem.lp_problem import LpProblem
from ..utils.exceptions import DimensionError, NonConvergenceError, ParameterError
from ..utils.logger import setup_logger

logger = setup_logger('katyusha')

STALL_EPOCHS = 5


class RowAccessCounter:
    """
    Stands in for an LpProblem and counts the rows of A each access reads.

    Reading `A` or forming a full residual counts all n rows; `rows(index)`
    counts len(index). Everything else is delegated.
    """

    def __init__(self, problem: LpProblem):
        self._problem = problem
        self.rows_read = 0

    @property
    def A(self):
        self.rows_read += self._problem.n
        return self._problem.A

    def rows(self, index: np.ndarray):
        self.rows_read += len(index)
        return self._problem.rows(index)

    def residual(self, x: np.ndarray) -> np.ndarray:
        self.rows_read += self._problem.n
        return self._problem.residual(x)

    def __getattr__(self, name):
        return getattr(self._problem, name)


def smoothness_constants(A, D: np.ndarray, W: np.ndarray, kappa: float,
                         tau: Optional[np.ndarray] = None) -> Tuple[float, float, np.ndarray]:
    """
    Smoothness and strong convexity of the split objective in the sketched metric.

    Returns:
        (L, sigma, Li) with L = 2 kappa, sigma = 1, Li = 2 kappa tau_i
    """
    n = A.shape[0]
    if D.shape != (n,) or W.shape != (n,):
        raise DimensionError(f"D and W must have length n={n}", obj='W')
    tau = leverage_scores(A, D) if tau is None else tau
    L = 2.0 * kappa
    return L, 1.0, 2.0 * kappa * tau


def batch_size(n: int, d: int, Z: int, kappa: float) -> int:
    """
    Batch size balancing sampling cost against the d^2 step overhead.

        kappa d >= n:  ceil(sqrt(n^(3/2) d^(5/2) / Z))
        kappa d <  n:  ceil(sqrt(n^2 d^2 / (Z sqrt(kappa))))
    """
    if min(n, d, Z, kappa) <= 0:
        raise ParameterError("batch_size needs positive n, d, Z and kappa")
    if kappa * d >= n:
        b = math.ceil(math.sqrt(n ** 1.5 * d ** 2.5 / Z))
    else:
        b = math.ceil(math.sqrt(n ** 2 * d ** 2 / (Z * math.sqrt(kappa))))
    return int(min(max(b, 1), n))


def predicted_katyusha_iterations(n: int, batch: int, L: float, sigma: float, Li: np.ndarray,
                                  ratio: float) -> float:
    """(n/b + sqrt(L/sigma) + (1/b) sqrt(n sum(Li)/sigma)) ln(1/ratio)"""
    total = float(np.sum(Li))
    bound = n / batch + math.sqrt(L / sigma) + math.sqrt(n * total / sigma) / batch
    return bound * math.log(1.0 / ratio)


def predicted_step_cost(nnz: int, n: int, batch: int, d: int) -> float:
    """Arithmetic per stochastic step: nnz(A) b / n + d^2"""
    return nnz * batch / n + d ** 2


def sampling_distribution(Li: np.ndarray) -> np.ndarray:
    """q_i = (1/2) Li / sum(L) + 1/(2n)"""
    n = Li.shape[0]
    total = float(np.sum(Li))
    if total <= 0.0:
        return np.full(n, 1.0 / n)
    q = 0.5 * Li / total + 0.5 / n
    return q / q.sum()


def katyusha_minimize(obj: PreconditionedObjective, y0: np.ndarray, batch: int, sigma: float, L: float,
                      Li: np.ndarray, target_gap_ratio: float, seed: int, cap_factor: float = 100.0,
                      phase: Optional[int] = None,
                      row_log: Optional[List[int]] = None) -> Tuple[np.ndarray, int]:
    """
    Minimize sum_i F_i from y0 by mini-batch Katyusha with negative momentum.

    Args:
        row_log: when given, receives the number of rows of A read by each step

    Returns:
        (y, epochs)

    Raises:
        NonConvergenceError: after cap_factor times the predicted iteration count
    """
    if not 0 < target_gap_ratio < 0.5:
        raise ParameterError(f"target_gap_ratio must lie in (0, 1/2), got {target_gap_ratio}")
    n = obj.problem.n
    if Li.shape != (n,):
        raise DimensionError(f"Li has length {Li.shape[0]}, expected n={n}", obj='Li')
    batch = int(min(max(batch, 1), n))

    rng = np.random.default_rng(seed)
    q = sampling_distribution(Li)
    epoch_length = int(math.ceil(2.0 * n / batch))

    # Importance-sampled estimator variance is governed by sum(Li) / b
    L_hat = max(L, 2.0 * float(np.sum(Li)) / batch)
    tau2 = 0.5
    tau1 = min(math.sqrt(epoch_length * sigma / (3.0 * L_hat)), 0.5)
    alpha = 1.0 / (3.0 * tau1 * L_hat)
    step = 1.0 / (3.0 * L_hat)

    cap_iterations = cap_factor * predicted_katyusha_iterations(n, batch, L, sigma, Li, target_gap_ratio)
    max_epochs = int(math.ceil(cap_iterations / epoch_length)) + 1

    snapshot = obj.project(np.asarray(y0, dtype=float))
    value0, full0 = obj.value_and_gradient(snapshot)
    grad0_sq = float(full0 @ full0)
    gradient_scale = obj.gradient_scale(snapshot)
    floor, stall_floor = NOISE_FLOOR * gradient_scale, STALL_FLOOR * gradient_scale
    if grad0_sq <= floor ** 2:
        return snapshot, 0

    y = snapshot.copy()
    z = snapshot.copy()
    full = full0
    weights_avg = (1.0 + alpha * sigma) ** np.arange(epoch_length)
    weights_avg /= weights_avg.sum()

    best, best_sq, best_at = snapshot, grad0_sq, 0

    # Inner steps see A only through the counter
    counter = RowAccessCounter(obj.problem)
    stepper = copy.copy(obj)
    stepper.problem = counter

    for epoch in range(1, max_epochs + 1):
        snapshot_derivs = obj.loss_derivatives(snapshot)
        average = np.zeros_like(snapshot)

        for j in range(epoch_length):
            point = tau1 * z + tau2 * snapshot + (1.0 - tau1 - tau2) * y
            index = rng.choice(n, size=batch, replace=True, p=q)
            scale = 1.0 / (batch * q[index])

            before = counter.rows_read
            grad_s, A_S = stepper.batch_terms(stepper.to_x(point), index)
            correction = np.asarray(A_S.T @ (scale * (grad_s - snapshot_derivs[index]))).ravel()
            estimate = full + stepper.preconditioner.apply_transpose(correction)
            if row_log is not None:
                row_log.append(counter.rows_read - before)

            z = z - alpha * estimate
            y = point - step * estimate
            average += weights_avg[j] * y

        snapshot = obj.project(average)
        value, full = obj.value_and_gradient(snapshot)
        grad_sq = float(full @ full)
        if not (math.isfinite(value) and math.isfinite(grad_sq)):
            raise NonConvergenceError(f"non-finite objective after {epoch} Katyusha epochs",
                                      iterations=epoch * epoch_length, phase=phase)

        if gap_certified(value0, grad0_sq, value, grad_sq, target_gap_ratio, L,
                         LOWER_SPECTRAL_BOUND * sigma):
            return snapshot, epoch
        if grad_sq < best_sq:
            best, best_sq, best_at = snapshot, grad_sq, epoch

        if grad_sq <= floor ** 2:
            return snapshot, epoch
        if epoch - best_at > STALL_EPOCHS and best_sq <= stall_floor ** 2:
            logger.debug(f"Katyusha stalled at round-off level after {epoch} epochs")
            return best, epoch

    raise NonConvergenceError(
        f"Katyusha did not reach gap ratio {target_gap_ratio:.3g} within {max_epochs} epochs",
        iterations=max_epochs * epoch_length, phase=phase,
    )


class KatyushaSolver(BaseSolver):
    """Mini-batch Katyusha with the leverage-score sketched preconditioner"""
    kind = SolverKind.KATYUSHA

    def __init__(self, config):
        super().__init__(config)
        self.outcome = None
        self.tau = None
        self.D = None
        self.row_log: Optional[List[int]] = None

    def build_preconditioner(self, problem: LpProblem, D: np.ndarray, phase: int) -> Preconditioner:
        retries = self.config.sparsify_retries
        self.tau = leverage_scores(problem.A, D)
        self.D = D
        self.outcome = sketch_preconditioner(problem.A, D, self.config.seed + phase * retries,
                                             self.config.sparsify_oversample, retries, tau=self.tau)
        return self.outcome.preconditioner

    def minimize(self, obj, y0, kappa, ratio, phase) -> PhaseSolution:
        problem = obj.problem
        L, sigma, Li = smoothness_constants(problem.A, self.D, self.outcome.W, kappa, tau=self.tau)
        batch = self.config.batch_size or batch_size(problem.n, problem.d, max(problem.nnz, 1), kappa)

        logger.debug(
            f"Phase {phase}: batch={batch}, sketch rows={obj.dim}, "
            f"predicted iterations={predicted_katyusha_iterations(problem.n, batch, L, sigma, Li, ratio):.0f}, "
            f"step cost={predicted_step_cost(problem.nnz, problem.n, batch, problem.d):.0f}"
        )

        y, epochs = katyusha_minimize(obj, y0, batch, sigma, L, Li, ratio, self.config.seed + phase,
                                      self.config.katyusha_cap_factor, phase, self.row_log)
        details = {'epochs': epochs, 'batch': batch, 'sketch_rows': obj.dim, 'sketch_attempts': self.outcome.attempts,
                   'sketch_fell_back': self.outcome.fell_back}
        steps = epochs * int(math.ceil(2.0 * problem.n / min(batch, problem.n)))
        return PhaseSolution(obj.to_x(y), steps, obj.preconditioner.kind, details)
