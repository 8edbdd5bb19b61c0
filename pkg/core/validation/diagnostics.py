# core/validation/diagnostics.py

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.linalg

from .oracle import bisect_path_point
from ..homotopy.path import diag_Dt, gamma, kappa, step_size
from ..problem.lp_problem import LpProblem
from ..smoothing.smoothed_loss import SmoothedLoss
from ..solvers.objective import PreconditionedObjective
from ..solvers.preconditioner import build_dense
from ..utils.exceptions import ParameterError
from ..utils.linalg import psd_eigh, to_dense

PATH_STEP = 1e-4


def finite_diff_gradient(func: Callable[[np.ndarray], float], x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central differences (f(x + step e_i) - f(x - step e_i)) / (2 step)"""
    if not step > 0:
        raise ParameterError(f"step must be positive, got {step}")
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = step
        grad[i] = (func(x + e) - func(x - e)) / (2.0 * step)
    return grad


def range_basis(obj: PreconditionedObjective) -> np.ndarray:
    """Orthonormal basis of range(Q) for the objective's preconditioned variable"""
    Q = np.column_stack([obj.project(e) for e in np.eye(obj.dim)])
    _, V = psd_eigh(0.5 * (Q + Q.T), rcond=1e-8)
    return V


def hessian_sandwich_check(obj: PreconditionedObjective, samples: int, seed: int,
                           center: Optional[np.ndarray] = None, spread: float = 1.0) -> Tuple[float, float]:
    """
    Extreme generalized Rayleigh ratios of (Hessian of g, Q) on range(Q).

    Q is an orthogonal projection, so on its range the ratios are the
    eigenvalues of the Hessian compressed to an orthonormal basis.
    """
    if obj.dim > 200:
        raise ParameterError(f"dense sandwich check needs dim <= 200, got {obj.dim}")
    rng = np.random.default_rng(seed)
    V = range_basis(obj)
    if V.shape[1] == 0:
        return 1.0, 1.0
    center = np.zeros(obj.dim) if center is None else np.asarray(center, dtype=float)

    lo, hi = np.inf, -np.inf
    for _ in range(samples):
        y = center + spread * obj.project(rng.standard_normal(obj.dim))
        K = V.T @ obj.hessian(y) @ V
        eig = scipy.linalg.eigvalsh(0.5 * (K + K.T))
        lo, hi = min(lo, float(eig[0])), max(hi, float(eig[-1]))
    return lo, hi


@dataclass
class PathSpeedReport:
    t_grid: List[float]
    max_ratio: float
    table: pd.DataFrame = field(default_factory=pd.DataFrame)


def speed_bound(p: float, n: int, t: float, s: np.ndarray) -> np.ndarray:
    """(p^2/(p-1)) sqrt(n) (t/|s_i|)^((p-2)/2)"""
    a = np.abs(s)
    with np.errstate(divide='ignore'):
        return p ** 2 / (p - 1.0) * np.sqrt(n) * (t / a) ** (0.5 * (p - 2.0))


def path_speed_check(problem: LpProblem, t_grid: Sequence[float], step: float = PATH_STEP) -> PathSpeedReport:
    """
    Finite-difference speed ds/dt along a one-column path against the speed bound.

    Returns:
        PathSpeedReport with the largest |ds_i/dt| / bound over the grid
    """
    a = to_dense(problem.A)[:, 0] if problem.d == 1 else None
    if a is None:
        raise ParameterError(f"path_speed_check needs d = 1, got d={problem.d}")
    p, n = problem.p, problem.n

    rows = []
    for t in t_grid:
        x_hi = bisect_path_point(problem, t * (1.0 + step))
        x_lo = bisect_path_point(problem, t * (1.0 - step))
        speed = np.abs(a * (x_hi - x_lo) / (2.0 * t * step))
        s = a * bisect_path_point(problem, t) - problem.b
        bound = speed_bound(p, n, t, s)
        ratio = np.where(speed <= 1e-12, 0.0, speed / np.where(bound > 0, bound, np.inf))
        worst = int(np.argmax(ratio))
        rows.append({'t': float(t), 'row': worst, 'speed': float(speed[worst]),
                     'bound': float(bound[worst]), 'ratio': float(ratio[worst])})

    table = pd.DataFrame(rows, columns=['t', 'row', 'speed', 'bound', 'ratio'])
    max_ratio = float(table['ratio'].max()) if not table.empty else 0.0
    return PathSpeedReport(list(map(float, t_grid)), max_ratio, table)


def phase_objective(problem: LpProblem, t: float, x: np.ndarray,
                    builder: Callable = build_dense) -> Tuple[PreconditionedObjective, float]:
    """Phase objective at (t, x) as the homotopy would build it, with its kappa"""
    p, n = problem.p, problem.n
    h = step_size(p)
    s = problem.residual(x)
    g = gamma(t, p, h, n)
    D = diag_Dt(s, t, p, g)
    loss = SmoothedLoss.with_bands(t, p, s, g)
    return PreconditionedObjective(problem, loss, h, builder(problem.A, D)), kappa(p, h, n)
