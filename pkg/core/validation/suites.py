# core/validation/suites.py
"""
Certification suites run by `lp-homotopy validate`.

Each check is a function (seed, sizes) -> (passed, detail) registered under a
name; `quick` uses desk-sized instances, `full` the acceptance sizes.
"""

import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np
import pandas as pd

from config.settings import settings
from config.solver_config import HomotopyConfig
from .diagnostics import finite_diff_gradient, hessian_sandwich_check, path_speed_check, phase_objective
from .oracle import reference_solve
from ..homotopy.homotopy_engine import HomotopyEngine, run
from ..homotopy.path import initial_point, initial_t0, kappa, kkt_residual, step_size
from ..problem.generator import generate_random
from ..problem.lp_problem import LpProblem, objective
from ..smoothing.smoothed_loss import evaluate
from ..solvers.katyusha import KatyushaSolver, batch_size
from ..solvers.objective import g_eval
from ..solvers.sampling import leverage_scores, sparsify
from ..utils.linalg import numerical_rank
from ..utils.logger import setup_logger

logger = setup_logger('validation')

# Central-difference step in the preconditioned variable; 1e-6 hits round-off on p = 8 phases
HYGIENE_STEP = 1e-4


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


SUITE_SIZES = {
    'quick': {
        'instances': [(30, 3, 1.5), (40, 3, 3.0), (40, 2, 4.0), (30, 2, 8.0)],
        'sandwich_states': 4,
        'katyusha': (60, 3, 3.0, 2),
        'sparsifier': (200, 5, 10),
        'random_trials': 10,
        'bench': None,
    },
    'full': {
        'instances': [(n, d, p) for n, d in ((100, 5), (500, 20), (2000, 50)) for p in (1.5, 3.0, 4.0, 8.0)]
                     + [(100, 20, p) for p in (1.5, 3.0, 4.0, 8.0)]
                     + [(500, 5, p) for p in (1.5, 3.0, 4.0, 8.0)]
                     + [(2000, 5, p) for p in (1.5, 3.0, 4.0, 8.0)]
                     + [(500, 50, p) for p in (1.5, 3.0, 4.0, 8.0)]
                     + [(100, 50, 3.0), (2000, 20, 3.0)],
        'sandwich_states': 20,
        'katyusha': (500, 5, 3.0, 20),
        'sparsifier': (200, 5, 50),
        'random_trials': 100,
        'bench': (4.0, (64, 256, 1024, 4096), 8, 1),
    },
}

CheckFn = Callable[[int, Dict, Dict], Tuple[bool, str]]
CHECKS: Dict[str, CheckFn] = {}
CHECK_SUITES: Dict[str, Tuple[str, ...]] = {}

# Slope bound on log(median per-phase iterations) against log(n)
SCALING_SLOPE_BOUND = 0.35


def register(name: str, suites: Tuple[str, ...] = ('quick', 'full')):
    def wrap(fn: CheckFn) -> CheckFn:
        CHECKS[name] = fn
        CHECK_SUITES[name] = suites
        return fn
    return wrap


def checks_for(suite: str) -> List[str]:
    """Names of the checks a suite runs, in registration order"""
    return [name for name in CHECKS if suite in CHECK_SUITES[name]]


def acceptance_epsilon(problem: LpProblem) -> float:
    """1e-6 (1 + objective at x = 0)"""
    return 1e-6 * (1.0 + objective(problem, np.zeros(problem.d)))


def _runs(seed: int, sizes: Dict, cache: Dict):
    """Homotopy reports on the suite instances, computed once per suite run"""
    if 'runs' not in cache:
        runs = []
        for i, (n, d, p) in enumerate(sizes['instances']):
            problem = generate_random(n, d, p, seed=seed + i)
            eps = acceptance_epsilon(problem)
            report = run(problem, HomotopyConfig(epsilon=eps, solver_kind='agd_dense', seed=seed + i))
            runs.append((problem, eps, report))
        cache['runs'] = runs
    return cache['runs']


@register('oracle_agreement')
def check_oracle_agreement(seed: int, sizes: Dict, cache: Dict) -> Tuple[bool, str]:
    worst = -np.inf
    for problem, eps, report in _runs(seed, sizes, cache):
        oracle = reference_solve(problem, eps)
        worst = max(worst, (report.final_objective - oracle.objective) / eps)
    return worst <= 1.0, f"max (homotopy - oracle)/eps = {worst:.3g}"


@register('path_containment')
def check_path_containment(seed: int, sizes: Dict, cache: Dict) -> Tuple[bool, str]:
    violations = sum(1 for _, _, report in _runs(seed, sizes, cache) for ph in report.phases if not ph.contained)
    return violations == 0, f"{violations} neighborhood violations"


@register('phase_count')
def check_phase_count(seed: int, sizes: Dict, cache: Dict) -> Tuple[bool, str]:
    worst = max(len(report.phases) / report.phase_bound for _, _, report in _runs(seed, sizes, cache))
    return worst <= 1.0, f"max phases / bound = {worst:.3g}"


@register('agd_iterations')
def check_agd_iterations(seed: int, sizes: Dict, cache: Dict) -> Tuple[bool, str]:
    worst = 0.0
    for problem, _, report in _runs(seed, sizes, cache):
        for ph in report.phases:
            bound = 10.0 * math.sqrt(ph.kappa) * math.log(ph.kappa * float(problem.n) ** 6)
            worst = max(worst, ph.inner_iterations / bound)
    return worst <= 1.0, f"max iterations / (10 sqrt(kappa) ln(kappa n^6)) = {worst:.3g}"


@register('hessian_sandwich')
def check_hessian_sandwich(seed: int, sizes: Dict, cache: Dict) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    passed, worst = True, ''
    for i in range(sizes['sandwich_states']):
        n, d, p = sizes['instances'][i % len(sizes['instances'])]
        problem = generate_random(n, min(d, 50), p, seed=seed + 100 + i)
        t = initial_t0(problem) * float(rng.uniform(1.0, 2.0))
        for _ in range(64):
            try:
                x = initial_point(problem, t)
                break
            except ValueError:
                t *= 2.0
        else:
            return False, f"state {i}: no valid closed-form start"
        obj, kappa_value = phase_objective(problem, t, x)
        lo, hi = hessian_sandwich_check(obj, 10, seed + i, center=obj.preconditioner.preimage(x))
        if lo < 1.0 - 1e-6 or hi > kappa_value + 1e-6:
            passed = False
            worst = f"state {i}: ratios [{lo:.6g}, {hi:.6g}] vs [1, {kappa_value:.6g}]"
    return passed, worst or f"{sizes['sandwich_states']} phase states within [1, kappa]"


@register('path_speed')
def check_path_speed(seed: int, sizes: Dict, cache: Dict) -> Tuple[bool, str]:
    problem = LpProblem.create(np.ones((1, 1)), [1.0], [0.1], 4.0)
    report = path_speed_check(problem, list(np.geomspace(0.05, 2.0, 25)))
    return report.max_ratio <= 1.1, f"max speed / bound = {report.max_ratio:.3g}"


def _kkt_term_scale(problem: LpProblem, t: float, x: np.ndarray) -> float:
    """1 + ||c|| + || |A|^T |f_t'(s)| ||, the magnitude of the terms that cancel in the KKT residual"""
    _, first, _, _ = evaluate(t, problem.p, problem.residual(x))
    spread = np.asarray(abs(problem.A).T @ np.abs(first)).ravel()
    return 1.0 + float(np.linalg.norm(problem.c)) + float(np.linalg.norm(spread))


@register('initial_point')
def check_initial_point(seed: int, sizes: Dict, cache: Dict) -> Tuple[bool, str]:
    worst = 0.0
    for i in range(sizes['random_trials']):
        n, d, p = sizes['instances'][i % len(sizes['instances'])]
        problem = generate_random(n, d, p, seed=seed + 200 + i)
        t = 2.0 * initial_t0(problem) + 1.0
        x = initial_point(problem, t)
        bound = 1e-8 * _kkt_term_scale(problem, t, x)
        worst = max(worst, kkt_residual(problem, t, x) / bound)
    return worst <= 1.0, f"max KKT residual / bound = {worst:.3g}"


@register('katyusha_agreement')
def check_katyusha_agreement(seed: int, sizes: Dict, cache: Dict) -> Tuple[bool, str]:
    n, d, p, trials = sizes['katyusha']
    worst, touches_ok = 0.0, True
    for i in range(trials):
        problem = generate_random(n, d, p, seed=seed + 300 + i)
        dense = run(problem, HomotopyConfig(epsilon=1e-7, solver_kind='agd_dense', seed=seed + i))
        config = HomotopyConfig(epsilon=1e-7, solver_kind='katyusha', seed=seed + i)
        solver = KatyushaSolver(config)
        solver.row_log = []
        stochastic = HomotopyEngine(problem, config, solver).run()
        worst = max(worst, abs(stochastic.final_objective - dense.final_objective))
        batch = batch_size(n, d, problem.nnz, kappa(p, step_size(p), n))
        touches_ok = touches_ok and all(rows == batch for rows in solver.row_log)
    detail = f"max |katyusha - agd_dense| = {worst:.3g}, rows per step {'ok' if touches_ok else 'MISMATCH'}"
    return worst <= 1e-5 and touches_ok, detail


@register('sparsifier_acceptance')
def check_sparsifier_acceptance(seed: int, sizes: Dict, cache: Dict) -> Tuple[bool, str]:
    n, d, trials = sizes['sparsifier']
    problem = generate_random(n, d, 3.0, seed=seed + 400)
    D = np.ones(n)
    tau = leverage_scores(problem.A, D)
    accepted = sum(1 for k in range(trials) if sparsify(problem.A, D, seed + k, tau=tau)[1])
    rate = accepted / trials
    return rate >= 0.9, f"first-try acceptance {accepted}/{trials}"


@register('numerical_hygiene')
def check_numerical_hygiene(seed: int, sizes: Dict, cache: Dict) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst_grad, worst_lev = 0.0, 0.0
    for i in range(sizes['random_trials'] // 2):
        n, d, p = sizes['instances'][i % len(sizes['instances'])]
        problem = generate_random(n, d, p, seed=seed + 500 + i)
        D = rng.uniform(0.5, 2.0, n)
        tau = leverage_scores(problem.A, D)
        worst_lev = max(worst_lev, abs(float(tau.sum()) - numerical_rank(problem.A)))

        t = 2.0 * initial_t0(problem) + 1.0
        obj, _ = phase_objective(problem, t, initial_point(problem, t))
        y = obj.project(rng.standard_normal(obj.dim))
        _, grad = g_eval(obj, y)
        fd = finite_diff_gradient(obj.value, y, HYGIENE_STEP)
        worst_grad = max(worst_grad, float(np.linalg.norm(fd - grad) / max(np.linalg.norm(grad), 1e-12)))
    passed = worst_grad <= 1e-5 and worst_lev <= 1e-8
    return passed, f"gradient rel. error {worst_grad:.2g}, leverage sum error {worst_lev:.2g}"


@register('bench_scaling', suites=('full',))
def check_bench_scaling(seed: int, sizes: Dict, cache: Dict) -> Tuple[bool, str]:
    from scripts.bench import BenchmarkEngine

    p, n_list, d, trials = sizes['bench']
    engine = BenchmarkEngine([p], n_list, d, trials, seed, max_workers=settings.workers(len(n_list)))
    summary = engine.summary(engine.run())
    slope = float(summary['slope'].iloc[0])
    medians = ', '.join(f"n={int(n)}: {m:g}" for n, m in zip(summary['n'], summary['median_inner_iters']))
    return slope <= SCALING_SLOPE_BOUND, f"log-log slope {slope:.3f} ({medians})"


def run_suite(suite: str = 'quick', seed: int = 0) -> List[CheckResult]:
    """Run every registered check; an exception fails that check only"""
    if suite not in SUITE_SIZES:
        raise ValueError(f"Unknown suite {suite!r}; choose from {sorted(SUITE_SIZES)}")
    sizes, cache = SUITE_SIZES[suite], {}
    results = []
    for name in checks_for(suite):
        check = CHECKS[name]
        started = time.perf_counter()
        try:
            passed, detail = check(seed, sizes, cache)
        except Exception as e:
            logger.error(f"Error in check {name}: {e}")
            passed, detail = False, f"{type(e).__name__}: {e}"
        results.append(CheckResult(name, bool(passed), detail, time.perf_counter() - started))
        logger.info(f"{name}: {'PASS' if passed else 'FAIL'} ({detail})")
    return results


def results_table(results: List[CheckResult]) -> pd.DataFrame:
    frame = pd.DataFrame([vars(r) for r in results], columns=['name', 'passed', 'detail', 'seconds'])
    frame['status'] = np.where(frame['passed'], 'PASS', 'FAIL')
    return frame[['name', 'status', 'detail', 'seconds']]
