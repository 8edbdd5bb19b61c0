from .agd import DenseAGDSolver, SparseAGDSolver, agd_minimize
from .base_solver import BaseSolver, PhaseSolution, SolverKind
from .katyusha import (KatyushaSolver, batch_size, katyusha_minimize, predicted_katyusha_iterations,
                       predicted_step_cost, smoothness_constants)
from .objective import PreconditionedObjective, g_eval
from .preconditioner import (DensePreconditioner, FactoredPreconditioner, Preconditioner,
                             SketchedPreconditioner, build_dense, build_factored, build_sketched)
from .sampling import leverage_scores, sketch_preconditioner, sparsify, verify_sparsifier
from .solver_manager import SolverManager
