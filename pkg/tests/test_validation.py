# tests/test_validation.py

import os
import unittest
from unittest import mock

import numpy as np

from core.homotopy.path import initial_point, initial_t0
from core.problem.generator import generate_random
from core.problem.lp_problem import LpProblem
from core.validation.diagnostics import (finite_diff_gradient, hessian_sandwich_check, path_speed_check,
                                         phase_objective, speed_bound)
from core.validation.oracle import bisect_minimizer, bisect_path_point, reference_solve
from core.validation.suites import (CHECKS, SUITE_SIZES, CheckResult, acceptance_epsilon, checks_for, results_table,
                                    run_suite)
from core.utils.exceptions import ParameterError


class TestReferenceOracle(unittest.TestCase):
    def test_quadratic_scalar(self):
        problem = LpProblem.create([[1.0]], [1.0], [1.0], 2.0)
        result = reference_solve(problem, 1e-10)
        self.assertAlmostEqual(result.x_star[0], 0.5, places=8)
        self.assertAlmostEqual(result.objective, 0.75, places=10)
        self.assertLessEqual(result.certificate, result.certificate_bound(problem))

    def test_least_squares(self):
        rng = np.random.default_rng(0)
        A, b = rng.normal(size=(12, 3)), rng.normal(size=12)
        problem = LpProblem.create(A, b, np.zeros(3), 2.0)
        result = reference_solve(problem, 1e-10)
        np.testing.assert_allclose(result.x_star, np.linalg.lstsq(A, b, rcond=None)[0], atol=1e-8)

    def test_matches_bisection_in_one_dimension(self):
        rng = np.random.default_rng(1)
        for p in (1.5, 3.0, 4.0):
            a = rng.normal(size=(15, 1))
            problem = LpProblem.create(a, rng.normal(size=15), [0.3 * float(rng.normal())], p)
            result = reference_solve(problem, 1e-10)
            self.assertAlmostEqual(result.x_star[0], bisect_minimizer(problem), delta=1e-8)
            self.assertLessEqual(result.certificate, result.certificate_bound(problem))

    def test_self_certifying_on_random_instances(self):
        for seed, p in enumerate((1.5, 3.0, 4.0, 8.0)):
            problem = generate_random(40, 3, p, seed=seed)
            result = reference_solve(problem, 1e-6)
            self.assertLessEqual(result.certificate, result.certificate_bound(problem))
            self.assertLessEqual(result.gap_bound, 1e-6)

    def test_rejects_bad_epsilon(self):
        problem = LpProblem.create([[1.0]], [1.0], [1.0], 2.0)
        with self.assertRaises(ParameterError):
            reference_solve(problem, 0.0)

    def test_bisection_needs_one_column(self):
        problem = LpProblem.create(np.eye(2), [1.0, 1.0], [0.0, 0.0], 3.0)
        with self.assertRaises(ParameterError):
            bisect_minimizer(problem)
        with self.assertRaises(ParameterError):
            bisect_path_point(LpProblem.create([[1.0]], [1.0], [0.0], 3.0), 0.0)


class TestFiniteDifferences(unittest.TestCase):
    def test_quadratic(self):
        grad = finite_diff_gradient(lambda x: float(x @ x), np.array([1.0, 2.0]), 1e-6)
        np.testing.assert_allclose(grad, [2.0, 4.0], atol=1e-6)

    def test_constant(self):
        np.testing.assert_array_equal(finite_diff_gradient(lambda x: 3.0, np.zeros(3)), np.zeros(3))

    def test_step_must_be_positive(self):
        with self.assertRaises(ParameterError):
            finite_diff_gradient(lambda x: 0.0, np.zeros(2), 0.0)


class TestHessianSandwich(unittest.TestCase):
    def _state(self, problem, scale=1.0):
        t = scale * initial_t0(problem)
        x = initial_point(problem, t)
        return phase_objective(problem, t, x), x

    def test_quadratic_loss_is_homogeneous(self):
        problem = generate_random(30, 3, 2.0, seed=2)
        (obj, kappa_value), x = self._state(problem)
        self.assertEqual(kappa_value, 8.0)
        lo, hi = hessian_sandwich_check(obj, 10, seed=0, center=obj.preconditioner.preimage(x))
        self.assertGreaterEqual(lo, 1.0 - 1e-6)
        self.assertLessEqual(hi, 8.0 + 1e-6)
        self.assertLessEqual(hi - lo, 1e-8 * hi)

    def test_random_quartic_state(self):
        problem = generate_random(40, 4, 4.0, seed=3)
        (obj, kappa_value), x = self._state(problem)
        lo, hi = hessian_sandwich_check(obj, 20, seed=1, center=obj.preconditioner.preimage(x))
        self.assertGreaterEqual(lo, 1.0 - 1e-6)
        self.assertLessEqual(hi, kappa_value + 1e-6)

    def test_all_quadratic_regime(self):
        problem = generate_random(20, 2, 4.0, seed=4)
        (obj, _), x = self._state(problem, scale=1e3)
        lo, hi = hessian_sandwich_check(obj, 5, seed=2, center=obj.preconditioner.preimage(x))
        self.assertLessEqual(hi - lo, 1e-8 * hi)


class TestPathSpeed(unittest.TestCase):
    def setUp(self):
        self.t_grid = list(np.geomspace(2.0, 0.01, 25))

    def test_quadratic_path_is_static(self):
        problem = LpProblem.create([[1.0], [2.0]], [1.0, -1.0], [0.1], 2.0)
        report = path_speed_check(problem, self.t_grid)
        self.assertEqual(report.max_ratio, 0.0)
        self.assertEqual(list(report.table.columns), ['t', 'row', 'speed', 'bound', 'ratio'])

    def test_quartic_speed_within_bound(self):
        problem = LpProblem.create([[1.0]], [1.0], [0.1], 4.0)
        report = path_speed_check(problem, self.t_grid)
        self.assertLessEqual(report.max_ratio, 1.1)
        # below t ~ 0.29 every residual sits outside the quadratic region
        outside = report.table[report.table['t'] < 0.25]
        self.assertTrue((outside['speed'] == 0.0).all())

    def test_needs_one_column(self):
        with self.assertRaises(ParameterError):
            path_speed_check(LpProblem.create(np.eye(2), [1.0, 0.0], [0.0, 0.0], 4.0), [1.0])

    def test_speed_bound_formula(self):
        np.testing.assert_allclose(speed_bound(4.0, 4, 1.0, np.array([0.5])), [(16.0 / 3.0) * 2.0 * 2.0])


class TestSuites(unittest.TestCase):
    def test_registry(self):
        self.assertEqual(set(CHECKS), {'oracle_agreement', 'path_containment', 'phase_count', 'agd_iterations',
                                       'hessian_sandwich', 'path_speed', 'initial_point', 'katyusha_agreement',
                                       'sparsifier_acceptance', 'numerical_hygiene', 'bench_scaling'})
        self.assertEqual(set(SUITE_SIZES), {'quick', 'full'})

    def test_bench_scaling_runs_in_full_suite_only(self):
        self.assertNotIn('bench_scaling', checks_for('quick'))
        self.assertIn('bench_scaling', checks_for('full'))
        self.assertEqual(len(checks_for('full')), len(CHECKS))
        self.assertEqual(SUITE_SIZES['full']['bench'], (4.0, (64, 256, 1024, 4096), 8, 1))

    def test_bench_scaling_check(self):
        sizes = {'bench': (4.0, (16, 32), 2, 1)}
        with mock.patch.dict(os.environ, {'LP_HOMOTOPY_THREADS': '1'}):
            passed, detail = CHECKS['bench_scaling'](0, sizes, {})
        self.assertIsInstance(passed, bool)
        self.assertIn('log-log slope', detail)
        self.assertIn('n=16', detail)
        self.assertIn('n=32', detail)

    def test_unknown_suite(self):
        with self.assertRaises(ValueError):
            run_suite('nightly')

    def test_standalone_checks(self):
        sizes = SUITE_SIZES['quick']
        for name in ('path_speed', 'initial_point', 'sparsifier_acceptance', 'numerical_hygiene'):
            passed, detail = CHECKS[name](0, sizes, {})
            self.assertTrue(passed, msg=f"{name}: {detail}")

    def test_acceptance_epsilon(self):
        problem = LpProblem.create([[1.0]], [2.0], [1.0], 2.0)
        self.assertAlmostEqual(acceptance_epsilon(problem), 5e-6, places=15)

    def test_results_table(self):
        frame = results_table([CheckResult('a', True, 'ok', 0.1), CheckResult('b', False, 'bad', 0.2)])
        self.assertEqual(list(frame.columns), ['name', 'status', 'detail', 'seconds'])
        self.assertEqual(list(frame['status']), ['PASS', 'FAIL'])


if __name__ == '__main__':
    unittest.main()
