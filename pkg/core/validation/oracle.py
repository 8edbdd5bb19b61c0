# core/validation/oracle.py
"""
Reference solver independent of the homotopy machinery.

Only the smoothing formulas are shared with the main solver: the oracle runs
damped Newton with full Hessian solves on c.x + sum_i f_t(s_i) while halving t,
and certifies its answer with the uniform gap n |p/2 - 1| t^p.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from ..problem.lp_problem import LpProblem, objective
from ..smoothing.smoothed_loss import evaluate, true_derivative, uniform_gap
from ..utils.exceptions import OracleError, ParameterError
from ..utils.linalg import gram, row_space_basis, to_dense
from ..utils.logger import setup_logger

logger = setup_logger('oracle')

NEWTON_TOLERANCE = 1e-12
MAX_NEWTON_STEPS = 200
BISECTION_STEPS = 200
SUBGRADIENT_STEPS = 1_000_000
SUBGRADIENT_MAX_DIM = 3


@dataclass
class OracleResult:
    x_star: np.ndarray
    objective: float
    method: str
    certificate: float
    t_final: float = 0.0
    gap_bound: float = 0.0

    def certificate_bound(self, problem: LpProblem) -> float:
        """1e-8 (1 + ||c|| + ||b||^(p-1))"""
        return 1e-8 * (1.0 + float(np.linalg.norm(problem.c))
                       + float(np.linalg.norm(problem.b)) ** (problem.p - 1.0))


def _smoothed(problem: LpProblem, t: float, x: np.ndarray):
    value, first, second, _ = evaluate(t, problem.p, problem.residual(x))
    return float(problem.c @ x) + float(np.sum(value)), first, second


def _certificate(problem: LpProblem, t: float, x: np.ndarray, basis: np.ndarray) -> float:
    _, first, _, _ = evaluate(t, problem.p, problem.residual(x))
    r = problem.c + np.asarray(problem.A.T @ first).ravel()
    return float(np.linalg.norm(basis.T @ r))


def _newton_stage(problem: LpProblem, t: float, x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Minimize c.x + sum f_t(Ax - b) over row-space(A) by damped Newton"""
    A = problem.A
    for _ in range(MAX_NEWTON_STEPS):
        value, first, second = _smoothed(problem, t, x)
        grad = basis.T @ (problem.c + np.asarray(A.T @ first).ravel())
        scale = 1.0 + float(np.linalg.norm(problem.c)) + float(np.linalg.norm(np.asarray(abs(A).T @ np.abs(first)).ravel()))
        if np.linalg.norm(grad) <= NEWTON_TOLERANCE * scale:
            return x

        H = basis.T @ gram(A, second) @ basis
        try:
            direction = -scipy.linalg.solve(H, grad, assume_a='pos')
        except (np.linalg.LinAlgError, ValueError):
            direction = -np.linalg.lstsq(H, grad, rcond=None)[0]
        decrement = -float(grad @ direction)
        if decrement <= NEWTON_TOLERANCE ** 2 * max(1.0, abs(value)):
            return x

        dx = basis @ direction
        if decrement <= 1e-10 * max(1.0, abs(value)):
            # quadratic convergence region: full step
            x = x + dx
            continue

        step = 1.0
        while step > 1e-20:
            trial = x + step * dx
            trial_value, _, _ = _smoothed(problem, t, trial)
            if trial_value <= value - 0.25 * step * decrement:
                break
            step *= 0.5
        else:
            if np.linalg.norm(grad) <= 1e-8 * scale:
                return x
            raise OracleError(f"Newton line search stalled at t={t:.3g}")
        x = trial

    value, first, _ = _smoothed(problem, t, x)
    grad = basis.T @ (problem.c + np.asarray(A.T @ first).ravel())
    if np.linalg.norm(grad) <= 1e-8 * scale:
        return x
    raise OracleError(f"Newton did not converge at t={t:.3g} within {MAX_NEWTON_STEPS} steps")


def _bracket(derivative: Callable[[float], float], radius: float):
    lo, hi = -radius, radius
    for _ in range(200):
        if derivative(lo) <= 0.0 <= derivative(hi):
            return lo, hi
        lo, hi = 2.0 * lo, 2.0 * hi
    raise OracleError("could not bracket the minimizer")


def _bisect(derivative: Callable[[float], float], radius: float) -> float:
    lo, hi = _bracket(derivative, radius)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if derivative(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def _column(problem: LpProblem) -> np.ndarray:
    if problem.d != 1:
        raise ParameterError(f"bisection needs a one-column problem, got d={problem.d}")
    return to_dense(problem.A)[:, 0]


def _radius(problem: LpProblem) -> float:
    return float(np.linalg.norm(problem.b)) + float(np.linalg.norm(problem.c)) + 1.0


def bisect_minimizer(problem: LpProblem) -> float:
    """Exact minimizer of a one-column problem by bisection on its subgradient"""
    a = _column(problem)
    c, p, b = float(problem.c[0]), problem.p, problem.b

    def derivative(x):
        return c + float(a @ true_derivative(p, a * x - b))

    return _bisect(derivative, _radius(problem))


def bisect_path_point(problem: LpProblem, t: float) -> float:
    """Path point x(t) of a one-column problem: root of c + sum a_i f_t'(a_i x - b_i)"""
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    a = _column(problem)
    c, p, b = float(problem.c[0]), problem.p, problem.b

    def derivative(x):
        _, first, _, _ = evaluate(t, p, a * x - b)
        return c + float(a @ first)

    return _bisect(derivative, _radius(problem))


def _subgradient(problem: LpProblem, x: np.ndarray) -> np.ndarray:
    """Best iterate of diminishing-step subgradient descent"""
    A = to_dense(problem.A)
    best, best_value = x.copy(), objective(problem, x)
    step0 = 1.0 / (1.0 + float(np.linalg.norm(A, 2)) ** 2)
    for k in range(1, SUBGRADIENT_STEPS + 1):
        g = problem.c + A.T @ true_derivative(problem.p, A @ x - problem.b)
        norm = float(np.linalg.norm(g))
        if norm == 0.0:
            return x
        x = x - (step0 / math.sqrt(k)) * g / norm
        value = objective(problem, x)
        if value < best_value:
            best, best_value = x.copy(), value
    return best


def reference_solve(problem: LpProblem, epsilon: float) -> OracleResult:
    """
    Minimize c.x + ||Ax - b||_p^p to within epsilon.

    Raises:
        OracleError: Newton stagnated and the instance is too large for the fallbacks
    """
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    n, p = problem.n, problem.p
    basis = row_space_basis(problem.A)
    t_final = (0.5 * epsilon / (n * p)) ** (1.0 / p)
    gap = n * uniform_gap(t_final, p)

    x, _, _, _ = np.linalg.lstsq(to_dense(problem.A), problem.b, rcond=None)
    t = max(float(np.linalg.norm(problem.b)) + 1.0, t_final)

    try:
        while True:
            x = _newton_stage(problem, t, x, basis)
            if t <= t_final:
                break
            t = max(0.5 * t, t_final)
        certificate = _certificate(problem, t_final, x, basis)
        return OracleResult(x, objective(problem, x), 'newton', certificate, t_final, gap)

    except OracleError as e:
        logger.warning(f"Reference Newton failed ({e}); trying the small-instance fallbacks")
        if problem.d == 1:
            x = np.array([bisect_minimizer(problem)])
            method = 'bisection'
        elif problem.d <= SUBGRADIENT_MAX_DIM:
            x = _subgradient(problem, basis @ (basis.T @ x))
            method = 'subgradient'
        else:
            logger.error(f"Reference solve failed for d={problem.d}: {e}")
            raise
        return OracleResult(x, objective(problem, x), method,
                            _certificate(problem, t_final, x, basis), t_final, gap)
