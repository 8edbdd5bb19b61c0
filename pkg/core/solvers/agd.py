# core/solvers/agd.py
"""
Accelerated gradient descent on a phase objective whose Hessian satisfies
Q <= H <= kappa Q for an orthogonal projection Q.

The iterate and every gradient live in range(Q), where the objective is
1-strongly convex and kappa-smooth; the constant step is 1/kappa and the
momentum (sqrt(kappa) - 1)/(sqrt(kappa) + 1).

The minimum is unknown, so the gap ratio is certified from gradients:
    g(y) - min g    <= |grad g(y)|^2 / 2
    g(y0) - min g   >= max(g(y0) - g(y), |grad g(y0)|^2 / (2 kappa))
"""

import math
from typing import Optional, Tuple

import numpy as np

from .base_solver import BaseSolver, PhaseSolution, SolverKind
from .objective import PreconditionedObjective
from .preconditioner import Preconditioner, build_dense, build_factored
from ..problem.lp_problem import LpProblem
from ..utils.exceptions import NonConvergenceError, ParameterError
from ..utils.logger import setup_logger

logger = setup_logger('agd')

# Gradients below this multiple of the gradient's term magnitude are round-off
NOISE_FLOOR = 1e-11
STALL_FLOOR = 1e-9


def iteration_cap(kappa: float, ratio: float, cap_factor: float = 100.0) -> int:
    """cap_factor * sqrt(kappa) * ln(kappa / ratio)"""
    return int(math.ceil(cap_factor * math.sqrt(kappa) * math.log(kappa / ratio)))


def gap_certified(value0: float, grad0_sq: float, value: float, grad_sq: float,
                  ratio: float, smoothness: float, strong_convexity: float = 1.0) -> bool:
    """True when the gradient bound proves g(y) - min g <= ratio (g(y0) - min g)"""
    gap_upper = 0.5 * grad_sq / strong_convexity
    initial_lower = max(value0 - value, 0.5 * grad0_sq / smoothness)
    return gap_upper <= ratio * initial_lower


def agd_minimize(obj: PreconditionedObjective, y0: np.ndarray, kappa: float, target_gap_ratio: float,
                 cap_factor: float = 100.0, phase: Optional[int] = None) -> Tuple[np.ndarray, int]:
    """
    Nesterov AGD with step 1/kappa restricted to range(Q).

    Returns:
        (y, iterations)

    Raises:
        NonConvergenceError: after cap_factor * sqrt(kappa) * ln(kappa / ratio) iterations
    """
    if not 0 < target_gap_ratio < 0.5:
        raise ParameterError(f"target_gap_ratio must lie in (0, 1/2), got {target_gap_ratio}")
    if not kappa >= 1:
        raise ParameterError(f"kappa must be at least 1, got {kappa}")

    cap = iteration_cap(kappa, target_gap_ratio, cap_factor)
    root = math.sqrt(kappa)
    momentum = (root - 1.0) / (root + 1.0)
    step = 1.0 / kappa

    y_prev = obj.project(np.asarray(y0, dtype=float))
    w = y_prev.copy()

    value0, grad0 = obj.value_and_gradient(w)
    grad0 = obj.project(grad0)
    grad0_sq = float(grad0 @ grad0)
    scale = obj.gradient_scale(w)
    floor, stall_floor = NOISE_FLOOR * scale, STALL_FLOOR * scale
    if grad0_sq <= floor ** 2:
        return w, 0

    best_y, best_sq, best_at = w, grad0_sq, 0
    stall_window = 10 * int(math.ceil(root)) + 10
    value, grad, grad_sq = value0, grad0, grad0_sq

    for iteration in range(1, cap + 1):
        y_next = w - step * grad
        w = y_next + momentum * (y_next - y_prev)
        y_prev = y_next

        value, grad = obj.value_and_gradient(w)
        grad = obj.project(grad)
        grad_sq = float(grad @ grad)
        if not (math.isfinite(value) and math.isfinite(grad_sq)):
            raise NonConvergenceError(f"non-finite objective after {iteration} AGD iterations",
                                      iterations=iteration, phase=phase)

        if grad_sq < best_sq:
            best_y, best_sq, best_at = w, grad_sq, iteration

        if gap_certified(value0, grad0_sq, value, grad_sq, target_gap_ratio, kappa):
            return w, iteration
        if grad_sq <= floor ** 2:
            return w, iteration
        if iteration - best_at > stall_window and best_sq <= stall_floor ** 2:
            logger.debug(f"AGD stalled at round-off level after {iteration} iterations")
            return best_y, iteration

    raise NonConvergenceError(
        f"AGD did not reach gap ratio {target_gap_ratio:.3g} within {cap} iterations (kappa={kappa:.4g})",
        iterations=cap, phase=phase,
    )


class _AGDSolver(BaseSolver):
    def minimize(self, obj, y0, kappa, ratio, phase) -> PhaseSolution:
        y, iterations = agd_minimize(obj, y0, kappa, ratio, self.config.agd_cap_factor, phase)
        logger.debug(f"Phase {phase}: AGD ({self.kind.value}) took {iterations} iterations")
        return PhaseSolution(obj.to_x(y), iterations, obj.preconditioner.kind)


class DenseAGDSolver(_AGDSolver):
    """AGD with the explicit preconditioner ((A^T D A)^+)^(1/2)"""
    kind = SolverKind.AGD_DENSE

    def build_preconditioner(self, problem: LpProblem, D: np.ndarray, phase: int) -> Preconditioner:
        return build_dense(problem.A, D)


class SparseAGDSolver(_AGDSolver):
    """AGD applying (A^T D A)^+ A^T sqrt(D) through a retained factorization"""
    kind = SolverKind.AGD_SPARSE

    def build_preconditioner(self, problem: LpProblem, D: np.ndarray, phase: int) -> Preconditioner:
        return build_factored(problem.A, D)
