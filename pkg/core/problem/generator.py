# core/problem/generator.py

import numpy as np
import scipy.sparse

from .lp_problem import LpProblem
from ..utils.exceptions import ParameterError
from ..utils.validators import Validators


def generate_random(n: int, d: int, p: float, density: float = 1.0, seed: int = 0) -> LpProblem:
    """
    Random overdetermined instance.

    A has standard-normal entries kept with probability `density` (CSR when
    density < 1), b is standard normal and c = A^T v with ||c||_2 = 1, so c lies
    in the row space of A by construction.
    """
    errors = Validators.validate_generator_params(n, d, p, density)
    if errors:
        raise ParameterError('; '.join(errors))

    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, d))
    if density < 1.0:
        mask = rng.random((n, d)) < density
        A = scipy.sparse.csr_matrix(A * mask)
    b = rng.standard_normal(n)

    c = np.asarray(A.T @ rng.standard_normal(n)).ravel()
    norm = np.linalg.norm(c)
    if norm > 0:
        c = c / norm

    problem = LpProblem.create(A, b, c, p)
    if density < 1.0 and not problem.is_sparse:
        # density < 1 always yields CSR storage for generated instances
        problem = LpProblem(A=scipy.sparse.csr_matrix(problem.A), b=problem.b, c=problem.c, p=problem.p)
    return problem
