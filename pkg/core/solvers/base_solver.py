# core/solvers/base_solver.py

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional

import numpy as np

from .objective import PreconditionedObjective
from .preconditioner import Preconditioner
from ..problem.lp_problem import LpProblem
from ..smoothing.smoothed_loss import SmoothedLoss
from ..utils.exceptions import ParameterError
from ..utils.validators import Validators


class SolverKind(Enum):
    AGD_DENSE = "agd_dense"
    AGD_SPARSE = "agd_sparse"
    KATYUSHA = "katyusha"

    @classmethod
    def parse(cls, kind) -> 'SolverKind':
        if isinstance(kind, cls):
            return kind
        normalized = Validators.normalize_solver_kind(kind)
        for member in cls:
            if member.value == normalized:
                return member
        raise ParameterError(f"Unknown solver kind: {kind}")


@dataclass
class PhaseSolution:
    x: np.ndarray
    iterations: int
    preconditioner: str
    details: Optional[Dict] = None


class BaseSolver(ABC):
    kind: SolverKind

    def __init__(self, config):
        """Initialize inner solver with the run configuration"""
        self.config = config

    @abstractmethod
    def build_preconditioner(self, problem: LpProblem, D: np.ndarray, phase: int) -> Preconditioner:
        """Preconditioner for one phase - to be implemented by each solver"""
        pass

    @abstractmethod
    def minimize(self, obj: PreconditionedObjective, y0: np.ndarray, kappa: float,
                 ratio: float, phase: int) -> PhaseSolution:
        """Inner minimization of the phase objective - to be implemented by each solver"""
        pass

    def solve_phase(self, problem: LpProblem, loss: SmoothedLoss, h: float, D: np.ndarray,
                    x_start: np.ndarray, kappa: float, ratio: float, phase: int) -> PhaseSolution:
        """Warm-start the phase objective at the preimage of x_start and map the minimizer back"""
        preconditioner = self.build_preconditioner(problem, D, phase)
        obj = PreconditionedObjective(problem, loss, h, preconditioner)
        y0 = preconditioner.preimage(x_start)
        return self.minimize(obj, y0, kappa, ratio, phase)
