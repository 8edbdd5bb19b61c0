# core/solvers/solver_manager.py

from typing import Dict, Type

from .agd import DenseAGDSolver, SparseAGDSolver
from .base_solver import BaseSolver, SolverKind
from .katyusha import KatyushaSolver
from ..utils.exceptions import ParameterError
from ..utils.logger import setup_logger

logger = setup_logger('solver_manager')


class SolverManager:
    """Registry of inner solvers keyed by SolverKind"""

    def __init__(self):
        self.solvers: Dict[SolverKind, Type[BaseSolver]] = {
            SolverKind.AGD_DENSE: DenseAGDSolver,
            SolverKind.AGD_SPARSE: SparseAGDSolver,
            SolverKind.KATYUSHA: KatyushaSolver,
        }

    def register(self, kind: SolverKind, solver_cls: Type[BaseSolver]) -> bool:
        """Add a solver class; refuses to replace an existing kind"""
        if kind in self.solvers:
            logger.error(f"Solver {kind.value} already registered")
            return False
        self.solvers[kind] = solver_cls
        logger.info(f"Registered solver {kind.value}")
        return True

    @property
    def kinds(self):
        return [kind.value for kind in self.solvers]

    def create(self, config) -> BaseSolver:
        """Instantiate the solver named by config.solver_kind"""
        kind = SolverKind.parse(config.solver_kind)
        if kind not in self.solvers:
            raise ParameterError(f"No solver registered for {kind.value}")
        logger.info(f"Using inner solver {kind.value}")
        return self.solvers[kind](config)
