from .lp_problem import LpProblem, project_to_rowspace, objective
from .matrix_market import load_problem, write_problem, read_vector, write_vector
from .generator import generate_random

__all__ = [
    'LpProblem', 'project_to_rowspace', 'objective',
    'load_problem', 'write_problem', 'read_vector', 'write_vector',
    'generate_random',
]
