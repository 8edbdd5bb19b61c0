from .diagnostics import (PathSpeedReport, finite_diff_gradient, hessian_sandwich_check, path_speed_check,
                          phase_objective)
from .oracle import OracleResult, bisect_minimizer, bisect_path_point, reference_solve
