# core/homotopy/path.py
"""Closed-form quantities along the homotopy path x(t)."""

import math

import numpy as np

from ..problem.lp_problem import LpProblem
from ..smoothing.smoothed_loss import evaluate
from ..utils.exceptions import DimensionError, ParameterError
from ..utils.linalg import gram, pinv_psd, row_space_basis
from ..utils.validators import Validators

# Strict-inequality margin used when checking the closed-form start
INITIAL_POINT_SAFETY = 1.01


def step_size(p: float) -> float:
    """Homotopy step h = 1/(2p)"""
    return 1.0 / (2.0 * p)


def _weighted_c_norm(problem: LpProblem) -> float:
    """c^T (A^T A)^+ c"""
    M_pinv = pinv_psd(gram(problem.A))
    return max(float(problem.c @ M_pinv @ problem.c), 0.0)


def initial_t0(problem: LpProblem) -> float:
    """t0 = max((2 c^T (A^T A)^+ c)^(1/(p-1)), 2 ||b||_2); 1 when both vanish"""
    q = _weighted_c_norm(problem)
    t0 = max((2.0 * q) ** (1.0 / (problem.p - 1.0)), 2.0 * float(np.linalg.norm(problem.b)))
    return t0 if t0 > 0 else 1.0


def initial_point(problem: LpProblem, t: float) -> np.ndarray:
    """
    Closed-form x(t) = (A^T A)^+ A^T b - (1/p) t^(2-p) (A^T A)^+ c.

    Valid when every residual stays in the quadratic region of f_t; refuses
    otherwise so the caller can enlarge t.
    """
    p = problem.p
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")

    q = _weighted_c_norm(problem)
    b_norm = float(np.linalg.norm(problem.b))
    if not t ** (p - 1.0) > INITIAL_POINT_SAFETY * (2.0 / p) * q:
        raise ParameterError(
            f"t={t:.6g} too small for the closed-form start: need t^(p-1) > (2/p) c^T(A^TA)^+c = {2.0 / p * q:.6g}; enlarge t"
        )
    if not t > INITIAL_POINT_SAFETY * 2.0 * b_norm:
        raise ParameterError(f"t={t:.6g} too small for the closed-form start: need t > 2||b|| = {2.0 * b_norm:.6g}; enlarge t")

    M_pinv = pinv_psd(gram(problem.A))
    Atb = np.asarray(problem.A.T @ problem.b).ravel()
    x = M_pinv @ Atb - (1.0 / p) * t ** (2.0 - p) * (M_pinv @ problem.c)

    s = problem.residual(x)
    if s.size and float(np.max(np.abs(s))) > t:
        raise ParameterError(f"t={t:.6g} too small: closed-form residual leaves [-t, t]; enlarge t")
    return x


def gamma(t: float, p: float, h: float, n: int) -> float:
    """Neighborhood width (1 + p^3/(p-1) sqrt(n) h) t^(p/2)"""
    if not Validators.validate_step(h, p):
        raise ParameterError(f"h must lie in [0, 1/(2p)], got {h}")
    return (1.0 + p ** 3 / (p - 1.0) * math.sqrt(n) * h) * t ** (0.5 * p)


def kappa(p: float, h: float, n: int) -> float:
    """Condition bound (2p^2/(p-1)) (3 + (2p^3/(p-1)) sqrt(n) h)^|2 - 4/p|"""
    if not Validators.validate_step(h, p):
        raise ParameterError(f"h must lie in [0, 1/(2p)], got {h}")
    base = 3.0 + 2.0 * p ** 3 / (p - 1.0) * math.sqrt(n) * h
    return 2.0 * p ** 2 / (p - 1.0) * base ** abs(2.0 - 4.0 / p)


def diag_Dt(s, t: float, p: float, gamma_value: float) -> np.ndarray:
    """D_ii = (p-1)/2 max(t^(p/2), |s_i|^(p/2) - sign(p-2) gamma)^(2 - 4/p)"""
    s = np.asarray(s, dtype=float)
    level = np.abs(s) ** (0.5 * p) - np.sign(p - 2.0) * gamma_value
    base = np.maximum(t ** (0.5 * p), level)
    return 0.5 * (p - 1.0) * base ** (2.0 - 4.0 / p)


def in_neighborhood(s_new, s_ref, gamma_value: float, p: float) -> bool:
    """True iff | |s_new_i|^(p/2) - |s_ref_i|^(p/2) | <= gamma for every i"""
    s_new = np.asarray(s_new, dtype=float)
    s_ref = np.asarray(s_ref, dtype=float)
    if s_new.shape != s_ref.shape:
        raise DimensionError(f"residuals differ in length: {s_new.shape} vs {s_ref.shape}", obj='s_new')
    deviation = np.abs(np.abs(s_new) ** (0.5 * p) - np.abs(s_ref) ** (0.5 * p))
    return bool(np.all(deviation <= gamma_value))


def termination_t(epsilon: float, n: int, p: float) -> float:
    """Radius below which x(t) is epsilon-optimal: (epsilon/(n p))^(1/p)"""
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    return (epsilon / (n * p)) ** (1.0 / p)


def phase_bound(epsilon: float, n: int, p: float, t0: float) -> float:
    """Phase budget 10 p ln(n p t0^p / epsilon)"""
    return 10.0 * p * max(math.log(n * p * t0 ** p / epsilon), 1.0)


def kkt_residual(problem: LpProblem, t: float, x: np.ndarray) -> float:
    """|| proj_rowspace(c + A^T f_t'(Ax - b)) ||_2"""
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    _, first, _, _ = evaluate(t, problem.p, problem.residual(x))
    r = problem.c + np.asarray(problem.A.T @ first).ravel()
    V = row_space_basis(problem.A)
    return float(np.linalg.norm(V.T @ r))


def path_velocity(problem: LpProblem, t: float, x: np.ndarray) -> np.ndarray:
    """dx/dt = -(A^T H_t A)^+ A^T (d/dt f_t')(s), H_t = diag f_t''(s)"""
    _, _, second, dt_first = evaluate(t, problem.p, problem.residual(x))
    M_pinv = pinv_psd(gram(problem.A, second))
    return -M_pinv @ np.asarray(problem.A.T @ dt_first).ravel()
