# core/homotopy/homotopy_engine.py

import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .path import (diag_Dt, gamma, in_neighborhood, initial_point, initial_t0, kappa, kkt_residual,
                   phase_bound, step_size, termination_t)
from .report import PhaseRecord, SolveReport
from ..problem.lp_problem import LpProblem, objective
from ..smoothing.smoothed_loss import SmoothedLoss
from ..solvers.base_solver import BaseSolver
from ..solvers.solver_manager import SolverManager
from ..utils.exceptions import InnerSolverError, MaxPhasesExceededError, NonConvergenceError, ParameterError
from ..utils.linalg import row_space_basis
from ..utils.logger import setup_logger

logger = setup_logger('homotopy_engine')

MAX_T0_DOUBLINGS = 64


class EngineState(Enum):
    READY = "READY"
    RUNNING = "RUNNING"
    FINISHED = "FINISHED"
    ERROR = "ERROR"


@dataclass
class HomotopyState:
    """Iterate at the start of phase k"""
    k: int
    t: float
    x: np.ndarray
    s: np.ndarray
    gamma: float = 0.0
    D: Optional[np.ndarray] = None
    kappa: float = 0.0


class HomotopyEngine:
    def __init__(self, problem: LpProblem, config, solver: Optional[BaseSolver] = None):
        """Initialize homotopy engine for one problem and configuration"""
        self.problem = problem
        self.config = config
        self.solver = solver or SolverManager().create(config)
        self.state = EngineState.READY
        self.current: Optional[HomotopyState] = None
        self.h = step_size(problem.p)
        self._basis = row_space_basis(problem.A)

    def _new_report(self) -> SolveReport:
        problem = self.problem
        return SolveReport(n=problem.n, d=problem.d, p=problem.p, nnz=problem.nnz,
                           solver_kind=self.solver.kind.value, seed=self.config.seed,
                           epsilon=self.config.epsilon)

    def _project(self, x: np.ndarray) -> np.ndarray:
        return self._basis @ (self._basis.T @ x)

    def _start(self):
        """t0 and the closed-form x(t0), doubling t0 until the start is valid"""
        t0 = initial_t0(self.problem)
        for _ in range(MAX_T0_DOUBLINGS + 1):
            try:
                return t0, initial_point(self.problem, t0)
            except ParameterError as e:
                logger.info(f"{e}; doubling t0")
                t0 *= 2.0
        raise ParameterError(f"No valid closed-form start after {MAX_T0_DOUBLINGS} doublings of t0")

    def _phase(self, state: HomotopyState, ratio: float) -> PhaseRecord:
        problem, p, h = self.problem, self.problem.p, self.h
        started = time.perf_counter()

        state.gamma = gamma(state.t, p, h, problem.n)
        state.D = diag_Dt(state.s, state.t, p, state.gamma)
        state.kappa = kappa(p, h, problem.n)
        loss = SmoothedLoss.with_bands(state.t, p, state.s, state.gamma)

        solution = self.solver.solve_phase(problem, loss, h, state.D, state.x, state.kappa, ratio, state.k)

        x_next = self._project(solution.x)
        s_next = problem.residual(x_next)
        t_next = (1.0 - h) * state.t
        contained = in_neighborhood(s_next, state.s, state.gamma, p)
        if not contained:
            logger.warning(f"Phase {state.k}: residual left the gamma-neighborhood of the previous phase")

        record = PhaseRecord(
            k=state.k,
            t_k=state.t,
            t_next=t_next,
            inner_iterations=solution.iterations,
            objective=objective(problem, x_next),
            kkt_residual=kkt_residual(problem, t_next, x_next),
            wall_ms=1000.0 * (time.perf_counter() - started),
            gamma=state.gamma,
            kappa=state.kappa,
            contained=contained,
            preconditioner=solution.preconditioner,
        )
        state.k, state.t, state.x, state.s = state.k + 1, t_next, x_next, s_next
        return record

    def run(self) -> SolveReport:
        """
        Follow the homotopy path from t0 down to the termination radius.

        Raises:
            MaxPhasesExceededError: more than config.max_phases phases needed
            InnerSolverError: an inner solve failed; carries the partial report
        """
        problem, config = self.problem, self.config
        report = self._new_report()
        started = time.perf_counter()
        self.state = EngineState.RUNNING

        try:
            t0, x0 = self._start()
            t_stop = termination_t(config.epsilon, problem.n, problem.p)
            ratio = config.inner_ratio(problem.n)
            report.t0 = t0
            report.phase_bound = phase_bound(config.epsilon, problem.n, problem.p, t0)

            x0 = self._project(x0)
            self.current = HomotopyState(k=0, t=t0, x=x0, s=problem.residual(x0))
            logger.info(f"Starting homotopy: n={problem.n}, d={problem.d}, p={problem.p}, "
                        f"t0={t0:.6g}, stop at t<={t_stop:.6g}")

            while self.current.t > t_stop:
                if self.current.k >= config.max_phases:
                    report.error = f"exceeded max_phases={config.max_phases}"
                    raise MaxPhasesExceededError(
                        f"Homotopy needs more than max_phases={config.max_phases} phases", report=report)
                try:
                    record = self._phase(self.current, ratio)
                except NonConvergenceError as e:
                    report.error = f"phase {self.current.k}: {e}"
                    raise InnerSolverError(f"Inner solver failed in phase {self.current.k}: {e}",
                                           phase=self.current.k, report=report) from e
                report.phases.append(record)
                logger.info(f"Phase {record.k}: t={record.t_k:.6g}, iterations={record.inner_iterations}, "
                            f"objective={record.objective:.10g}")

            report.t_end = self.current.t
            report.final_x = self.current.x
            report.final_objective = objective(problem, self.current.x)
            report.converged = True
            self.state = EngineState.FINISHED
            return report

        except Exception as e:
            logger.error(f"Error running homotopy: {e}")
            self.state = EngineState.ERROR
            if self.current is not None:
                report.t_end = self.current.t
                report.final_x = self.current.x
                report.final_objective = objective(problem, self.current.x)
            raise

        finally:
            report.total_wall_ms = 1000.0 * (time.perf_counter() - started)


def run(problem: LpProblem, config) -> SolveReport:
    """Solve min c.x + ||Ax - b||_p^p by the homotopy method"""
    return HomotopyEngine(problem, config).run()
