from .homotopy_engine import EngineState, HomotopyEngine, HomotopyState, run
from .path import (diag_Dt, gamma, in_neighborhood, initial_point, initial_t0, kappa, kkt_residual,
                   path_velocity, phase_bound, step_size, termination_t)
from .report import PhaseRecord, SolveReport
