# core/solvers/objective.py

from typing import Optional, Tuple

import numpy as np
import scipy.sparse

from .preconditioner import Preconditioner
from ..problem.lp_problem import LpProblem
from ..smoothing.smoothed_loss import SmoothedLoss, tilde_eval
from ..utils.exceptions import DimensionError, ParameterError


class PreconditionedObjective:
    """
    Phase objective in the preconditioned variable:

        g(y) = c . P y + tilde-f(A P y - b)
    """

    def __init__(self, problem: LpProblem, loss: SmoothedLoss, h: float, preconditioner: Preconditioner):
        if not loss.has_intervals:
            raise ParameterError("the phase objective needs a banded loss")
        if loss.lower.shape[0] != problem.n:
            raise DimensionError(f"{loss.lower.shape[0]} intervals for n={problem.n} rows", obj='intervals')
        self.problem = problem
        self.loss = loss
        self.h = h
        self.preconditioner = preconditioner
        self.c_image = preconditioner.apply_transpose(problem.c)
        self._matrix: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.preconditioner.dim

    def to_x(self, y: np.ndarray) -> np.ndarray:
        return self.preconditioner.apply(y)

    def project(self, y: np.ndarray) -> np.ndarray:
        return self.preconditioner.project(y)

    def value(self, y: np.ndarray) -> float:
        x = self.to_x(y)
        loss_value, _, _ = tilde_eval(self.loss, self.h, self.problem.residual(x))
        return float(self.problem.c @ x) + loss_value

    def value_and_gradient(self, y: np.ndarray) -> Tuple[float, np.ndarray]:
        x = self.to_x(y)
        loss_value, grad_s, _ = tilde_eval(self.loss, self.h, self.problem.residual(x))
        value = float(self.problem.c @ x) + loss_value
        gradient = self.c_image + self.preconditioner.apply_transpose(np.asarray(self.problem.A.T @ grad_s).ravel())
        return value, gradient

    def loss_derivatives(self, y: np.ndarray) -> np.ndarray:
        """tilde-f gradient at s = A P y - b over all rows"""
        _, grad_s, _ = tilde_eval(self.loss, self.h, self.problem.residual(self.to_x(y)))
        return grad_s

    def batch_terms(self, x: np.ndarray, index: np.ndarray) -> Tuple[np.ndarray, object]:
        """tilde-f gradient on the rows in index (repeats allowed), plus those rows of A"""
        A_S = self.problem.rows(index)
        s_S = np.asarray(A_S @ x).ravel() - self.problem.b[index]
        _, grad_s, _ = self.loss.terms(self.h, s_S, index=index)
        return grad_s, A_S

    def gradient_scale(self, y: np.ndarray) -> float:
        """Magnitude of the terms summed into the gradient, for round-off floors"""
        x = self.to_x(y)
        _, grad_s, _ = tilde_eval(self.loss, self.h, self.problem.residual(x))
        A = self.problem.A
        absA = abs(A) if scipy.sparse.issparse(A) else np.abs(A)
        spread = np.asarray(absA.T @ np.abs(grad_s)).ravel()
        return float(np.linalg.norm(self.c_image)) + float(np.linalg.norm(self.preconditioner.apply_transpose(spread)))

    def hessian(self, y: np.ndarray) -> np.ndarray:
        """Explicit P^T A^T Sigma(y) A P (diagnostics only)"""
        if self._matrix is None:
            self._matrix = self.preconditioner.as_matrix()
        AP = np.asarray(self.problem.A @ self._matrix)
        _, _, sigma = tilde_eval(self.loss, self.h, self.problem.residual(self.to_x(y)))
        H = AP.T @ (AP * sigma[:, None])
        return 0.5 * (H + H.T)


def g_eval(obj: PreconditionedObjective, y: np.ndarray) -> Tuple[float, np.ndarray]:
    """Value and analytic gradient of the phase objective"""
    return obj.value_and_gradient(y)
