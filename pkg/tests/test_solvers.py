# tests/test_solvers.py

import math
import unittest

import numpy as np
import scipy.sparse

from config.solver_config import HomotopyConfig
from core.homotopy.homotopy_engine import run
from core.homotopy.path import diag_Dt, gamma, in_neighborhood, initial_point, initial_t0, kappa, step_size
from core.problem.generator import generate_random
from core.problem.lp_problem import LpProblem
from core.smoothing.smoothed_loss import SmoothedLoss, tilde_eval
from core.solvers.agd import DenseAGDSolver, SparseAGDSolver, agd_minimize, iteration_cap
from core.solvers.base_solver import SolverKind
from core.solvers.katyusha import (KatyushaSolver, RowAccessCounter, batch_size, katyusha_minimize,
                                   predicted_katyusha_iterations, sampling_distribution, smoothness_constants)
from core.solvers.objective import PreconditionedObjective, g_eval
from core.solvers.preconditioner import build_dense, build_factored
from core.solvers.sampling import leverage_scores, sketch_preconditioner, sparsify, verify_sparsifier
from core.solvers.solver_manager import SolverManager
from core.utils.exceptions import NonConvergenceError, ParameterError
from core.utils.linalg import gram
from core.validation.diagnostics import finite_diff_gradient, phase_objective
from core.validation.oracle import bisect_path_point


class QuadraticObjective:
    """g(y) = 1/2 y^T diag(weights) y with the identity projection"""

    def __init__(self, weights):
        self.weights = np.asarray(weights, dtype=float)

    def project(self, y):
        return y

    def value_and_gradient(self, y):
        return 0.5 * float(y @ (self.weights * y)), self.weights * y

    def gradient_scale(self, y):
        return 1.0


class TestPreconditioners(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(0)
        self.A = rng.normal(size=(10, 3))
        self.D = rng.uniform(0.5, 2.0, size=10)

    def test_dense_identity(self):
        np.testing.assert_allclose(build_dense(np.eye(3), np.ones(3)).P, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(build_dense(np.eye(2), np.array([4.0, 9.0])).P,
                                   np.diag([0.5, 1.0 / 3.0]), atol=1e-12)

    def test_dense_projection(self):
        pre = build_dense(self.A, self.D)
        Q = pre.P @ gram(self.A, self.D) @ pre.P
        np.testing.assert_allclose(Q @ Q, Q, atol=1e-8)
        np.testing.assert_allclose(pre.P, pre.P.T, atol=1e-12)

    def test_factored_identity(self):
        pre = build_factored(np.eye(4), np.ones(4))
        z = np.arange(4.0)
        np.testing.assert_allclose(pre.apply(z), z, atol=1e-12)

    def test_factored_operator_is_symmetric_psd(self):
        pre = build_factored(self.A, self.D)
        rng = np.random.default_rng(1)
        for _ in range(10):
            u, v = rng.normal(size=3), rng.normal(size=3)
            self.assertGreaterEqual(float(u @ pre.apply(pre.apply_transpose(u))), -1e-10)
            self.assertAlmostEqual(float(u @ pre.apply(pre.apply_transpose(v))),
                                   float(v @ pre.apply(pre.apply_transpose(u))), places=10)

    def test_factored_sparse_matches_dense_formula(self):
        A = scipy.sparse.csr_matrix(self.A)
        pre = build_factored(A, self.D)
        z = np.random.default_rng(2).normal(size=10)
        expected = np.linalg.solve(gram(self.A, self.D), self.A.T @ (np.sqrt(self.D) * z))
        np.testing.assert_allclose(pre.apply(z), expected, rtol=1e-9, atol=1e-12)

    def test_factored_singular_falls_back(self):
        A = np.column_stack([self.A[:, 0], self.A[:, 0]])
        with self.assertLogs('preconditioner', level='WARNING'):
            pre = build_factored(A, self.D)
        self.assertFalse(pre.exact)
        z = np.random.default_rng(3).normal(size=10)
        expected = np.linalg.pinv(gram(A, self.D)) @ (A.T @ (np.sqrt(self.D) * z))
        np.testing.assert_allclose(pre.apply(z), expected, atol=1e-8)


class TestSampling(unittest.TestCase):
    def test_leverage_scores(self):
        np.testing.assert_allclose(leverage_scores(np.eye(5), np.ones(5)), np.ones(5), atol=1e-12)
        np.testing.assert_allclose(leverage_scores(np.ones((3, 1)), np.ones(3)), np.full(3, 1.0 / 3.0), atol=1e-12)
        rng = np.random.default_rng(4)
        tau = leverage_scores(rng.normal(size=(50, 5)), rng.uniform(0.1, 3.0, size=50))
        self.assertAlmostEqual(float(tau.sum()), 5.0, delta=1e-8)
        self.assertTrue(np.all((tau >= 0) & (tau <= 1)))

    def test_exact_copy_is_accepted(self):
        rng = np.random.default_rng(5)
        A, D = rng.normal(size=(30, 4)), rng.uniform(0.5, 2.0, size=30)
        lo, hi = verify_sparsifier(A, D, D.copy())
        self.assertAlmostEqual(lo, 1.0, places=8)
        self.assertAlmostEqual(hi, 1.0, places=8)

    def test_fallback_uses_exact_weights(self):
        A, D = np.eye(4), np.ones(4)
        outcome = sketch_preconditioner(A, D, seed=0, retries=0)
        self.assertTrue(outcome.fell_back)
        np.testing.assert_array_equal(outcome.W, D)
        self.assertEqual(outcome.preconditioner.dim, 4)

    def test_acceptance_rate(self):
        rng = np.random.default_rng(6)
        A, D = rng.normal(size=(200, 5)), rng.uniform(0.5, 2.0, size=200)
        tau = leverage_scores(A, D)
        accepted = sum(sparsify(A, D, seed, tau=tau)[1] for seed in range(50))
        self.assertGreaterEqual(accepted, 45)

    def test_sparsify_is_unbiased_support(self):
        rng = np.random.default_rng(7)
        A, D = rng.normal(size=(200, 5)), np.ones(200)
        W, accepted = sparsify(A, D, seed=1)
        self.assertTrue(np.all(W >= 0))
        self.assertLessEqual(int(np.count_nonzero(W)), math.ceil(8 * 5 * math.log(5) * 4))
        if accepted:
            lo, hi = verify_sparsifier(A, D, W)
            self.assertGreaterEqual(lo, 0.5)
            self.assertLessEqual(hi, 2.0)


class TestPreconditionedObjective(unittest.TestCase):
    def setUp(self):
        self.problem = generate_random(20, 4, 4.0, seed=8)
        t = initial_t0(self.problem)
        self.t = t
        self.x0 = initial_point(self.problem, t)

    def test_gradient_matches_finite_differences(self):
        obj, _ = phase_objective(self.problem, self.t, self.x0)
        rng = np.random.default_rng(9)
        for _ in range(50):
            y = obj.preconditioner.preimage(self.x0) + rng.normal(size=obj.dim)
            _, grad = g_eval(obj, y)
            fd = finite_diff_gradient(obj.value, y)
            self.assertLessEqual(np.linalg.norm(fd - grad), 1e-5 * max(np.linalg.norm(grad), 1.0))

    def test_zero_data_gradient(self):
        problem = LpProblem.create(np.eye(3), np.zeros(3), np.zeros(3), 3.0)
        loss = SmoothedLoss.with_bands(1.0, 3.0, np.zeros(3), 0.5)
        obj = PreconditionedObjective(problem, loss, step_size(3.0), build_dense(problem.A, np.ones(3)))
        value, grad = g_eval(obj, np.zeros(3))
        self.assertEqual(value, 0.0)
        np.testing.assert_array_equal(grad, np.zeros(3))

    def test_dense_and_factored_agree(self):
        dense, kap = phase_objective(self.problem, self.t, self.x0, build_dense)
        factored, _ = phase_objective(self.problem, self.t, self.x0, build_factored)
        y_dense, _ = agd_minimize(dense, dense.preconditioner.preimage(self.x0), kap, 1e-14)
        y_fact, _ = agd_minimize(factored, factored.preconditioner.preimage(self.x0), kap, 1e-14)
        x_dense, x_fact = dense.to_x(y_dense), factored.to_x(y_fact)
        np.testing.assert_allclose(x_dense, x_fact, atol=1e-6 * (1.0 + np.linalg.norm(x_dense)))
        self.assertAlmostEqual(dense.value(y_dense), factored.value(y_fact), delta=1e-8 * (1.0 + abs(dense.value(y_dense))))


class TestAGD(unittest.TestCase):
    def test_isotropic_quadratic(self):
        obj = QuadraticObjective([1.0, 1.0])
        y, _ = agd_minimize(obj, np.array([1.0, 1.0]), 1.0, 1e-6)
        self.assertLessEqual(float(y @ y), 2e-6)

    def test_ill_conditioned_quadratic(self):
        ratio = 1e-6
        obj = QuadraticObjective([1.0, 100.0])
        y0 = np.array([1.0, 1.0])
        y, iterations = agd_minimize(obj, y0, 100.0, ratio)
        self.assertLessEqual(iterations, 10 * 10 * math.log(100.0 / ratio))
        self.assertLessEqual(obj.value_and_gradient(y)[0], ratio * obj.value_and_gradient(y0)[0])

    def test_cap_and_parameters(self):
        obj = QuadraticObjective([1.0, 100.0])
        with self.assertRaises(NonConvergenceError):
            agd_minimize(obj, np.array([1.0, 1.0]), 100.0, 1e-6, cap_factor=1e-3)
        with self.assertRaises(ParameterError):
            agd_minimize(obj, np.array([1.0, 1.0]), 100.0, 0.5)
        with self.assertRaises(ParameterError):
            agd_minimize(obj, np.array([1.0, 1.0]), 0.5, 1e-3)
        self.assertEqual(iteration_cap(100.0, 1e-6, 1.0), math.ceil(10.0 * math.log(100.0 / 1e-6)))


class TestKatyusha(unittest.TestCase):
    def setUp(self):
        self.problem = generate_random(60, 3, 3.0, seed=10)
        p, n = self.problem.p, self.problem.n
        self.h = step_size(p)
        t = initial_t0(self.problem)
        self.x0 = initial_point(self.problem, t)
        s = self.problem.residual(self.x0)
        g = gamma(t, p, self.h, n)
        self.D = diag_Dt(s, t, p, g)
        self.kappa = kappa(p, self.h, n)
        self.loss = SmoothedLoss.with_bands(t, p, s, g)
        outcome = sketch_preconditioner(self.problem.A, self.D, seed=0)
        self.obj = PreconditionedObjective(self.problem, self.loss, self.h, outcome.preconditioner)
        self.L, self.sigma, self.Li = smoothness_constants(self.problem.A, self.D, outcome.W, self.kappa)
        self.batch = batch_size(n, 3, self.problem.nnz, self.kappa)

    def _solve(self, seed, row_log=None):
        y0 = self.obj.preconditioner.preimage(self.x0)
        return katyusha_minimize(self.obj, y0, self.batch, self.sigma, self.L, self.Li, 1e-8, seed,
                                 row_log=row_log)

    def test_deterministic_given_seed(self):
        y1, epochs1 = self._solve(3)
        y2, epochs2 = self._solve(3)
        np.testing.assert_array_equal(y1, y2)
        self.assertEqual(epochs1, epochs2)

    def test_rows_read_per_step(self):
        row_log = []
        _, epochs = self._solve(4, row_log)
        self.assertEqual(len(row_log), epochs * math.ceil(2 * self.problem.n / self.batch))
        self.assertTrue(all(rows == self.batch for rows in row_log))

    def test_row_counter_sees_full_passes(self):
        n = self.problem.n

        class FullPassObjective(PreconditionedObjective):
            def batch_terms(self, x, index):
                self.problem.residual(x)
                return super().batch_terms(x, index)

        obj = FullPassObjective(self.problem, self.loss, self.h, self.obj.preconditioner)
        row_log = []
        katyusha_minimize(obj, obj.preconditioner.preimage(self.x0), self.batch, self.sigma, self.L, self.Li,
                          1e-8, 4, row_log=row_log)
        self.assertTrue(row_log)
        self.assertTrue(all(rows == self.batch + n for rows in row_log))

    def test_row_access_counter(self):
        counter = RowAccessCounter(self.problem)
        counter.rows(np.array([0, 0, 3]))
        self.assertEqual(counter.rows_read, 3)
        self.assertEqual((counter.n, counter.d), (self.problem.n, 3))
        np.testing.assert_array_equal(counter.b, self.problem.b)
        self.assertEqual(counter.rows_read, 3)
        self.assertIs(counter.A, self.problem.A)
        self.assertEqual(counter.rows_read, 3 + self.problem.n)

    def test_matches_agd(self):
        y, _ = self._solve(5)
        dense = PreconditionedObjective(self.problem, self.loss, self.h, build_dense(self.problem.A, self.D))
        y_dense, _ = agd_minimize(dense, dense.preconditioner.preimage(self.x0), self.kappa, 1e-10)
        v_kat, v_agd = self.obj.value(y), dense.value(y_dense)
        self.assertAlmostEqual(v_kat, v_agd, delta=1e-6 * (1.0 + abs(v_agd)))

    def test_smoothness_constants(self):
        L, sigma, Li = smoothness_constants(np.eye(5), np.ones(5), np.ones(5), 8.0)
        self.assertEqual((L, sigma), (16.0, 1.0))
        np.testing.assert_allclose(Li, np.full(5, 16.0), atol=1e-10)
        self.assertAlmostEqual(float(self.Li.sum()) / (2 * self.kappa * 3), 1.0, delta=1e-6)
        self.assertTrue(np.all(self.Li <= self.L * (1 + 1e-12)))

    def test_batch_size(self):
        self.assertEqual(batch_size(256, 4, 1024, 100.0), 12)
        self.assertEqual(batch_size(100, 2, 200, 4.0), 10)
        self.assertEqual(batch_size(5, 5, 1, 100.0), 5)
        with self.assertRaises(ParameterError):
            batch_size(0, 2, 2, 4.0)

    def test_sampling_distribution(self):
        q = sampling_distribution(np.array([3.0, 1.0, 0.0, 0.0]))
        np.testing.assert_allclose(q, [0.5, 0.25, 0.125, 0.125])
        np.testing.assert_allclose(sampling_distribution(np.zeros(4)), np.full(4, 0.25))

    def test_predicted_iterations(self):
        expected = (10 / 2 + math.sqrt(16.0) + math.sqrt(10 * 8.0) / 2) * math.log(100.0)
        self.assertAlmostEqual(predicted_katyusha_iterations(10, 2, 16.0, 1.0, np.full(10, 0.8), 0.01), expected)


class TestSolverRoutes(unittest.TestCase):
    def setUp(self):
        self.problem = generate_random(40, 3, 3.0, seed=11)

    def test_routes_agree(self):
        objectives = {}
        for kind in ('agd_dense', 'agd_sparse', 'katyusha'):
            report = run(self.problem, HomotopyConfig(epsilon=1e-6, solver_kind=kind, seed=2))
            self.assertTrue(report.converged)
            objectives[kind] = report.final_objective
        reference = objectives['agd_dense']
        for kind, value in objectives.items():
            self.assertAlmostEqual(value, reference, delta=1e-5 * (1.0 + abs(reference)), msg=kind)

    @staticmethod
    def _start(problem):
        t = initial_t0(problem)
        for _ in range(64):
            try:
                return t, initial_point(problem, t)
            except ParameterError:
                t *= 2.0
        raise AssertionError("no closed-form start")

    @staticmethod
    def _phase_inputs(problem, t, x):
        p, n = problem.p, problem.n
        h = step_size(p)
        s = problem.residual(x)
        g = gamma(t, p, h, n)
        return h, diag_Dt(s, t, p, g), kappa(p, h, n), SmoothedLoss.with_bands(t, p, s, g)

    def test_single_row_katyusha_matches_agd(self):
        problem = LpProblem.create([[2.0]], [1.0], [0.5], 3.0)
        t, x0 = self._start(problem)
        h, D, kap, loss = self._phase_inputs(problem, t, x0)

        outcome = sketch_preconditioner(problem.A, D, seed=0)
        sketched = PreconditionedObjective(problem, loss, h, outcome.preconditioner)
        L, sigma, Li = smoothness_constants(problem.A, D, outcome.W, kap)
        y, _ = katyusha_minimize(sketched, sketched.preconditioner.preimage(x0), 1, sigma, L, Li, 1e-10, 0)

        dense = PreconditionedObjective(problem, loss, h, build_dense(problem.A, D))
        y_dense, _ = agd_minimize(dense, dense.preconditioner.preimage(x0), kap, 1e-10)
        np.testing.assert_allclose(sketched.to_x(y), dense.to_x(y_dense), atol=1e-4)

    def test_phase_output_near_path_point(self):
        for p in (1.5, 4.0):
            problem = generate_random(20, 1, p, seed=12)
            ratio = HomotopyConfig().inner_ratio(problem.n)
            for kind in ('agd_dense', 'agd_sparse', 'katyusha'):
                solver = SolverManager().create(HomotopyConfig(solver_kind=kind, seed=1))
                t, x = self._start(problem)
                for k in range(3):
                    h, D, kap, loss = self._phase_inputs(problem, t, x)
                    solution = solver.solve_phase(problem, loss, h, D, x, kap, ratio, k)
                    t = (1.0 - h) * t
                    x_path = np.array([bisect_path_point(problem, t)])
                    width = 2.0 * gamma(t, p, h, problem.n)
                    self.assertTrue(in_neighborhood(problem.residual(solution.x), problem.residual(x_path), width, p),
                                    msg=f"p={p}, {kind}, phase {k}")
                    x = solution.x

    def test_katyusha_run_is_deterministic(self):
        config = HomotopyConfig(epsilon=1e-4, solver_kind='katyusha', seed=7)
        first = run(self.problem, config)
        second = run(self.problem, config)
        np.testing.assert_array_equal(first.final_x, second.final_x)
        self.assertEqual(first.inner_iterations, second.inner_iterations)


class TestCurvatureSandwich(unittest.TestCase):
    def test_band_curvature_between_D_and_kappa_D(self):
        rng = np.random.default_rng(21)
        n = 200
        for p in (1.25, 1.5, 3.0, 4.0, 8.0):
            h = step_size(p)
            kap = kappa(p, h, n)
            for t in (1e-2, 1.0, 10.0):
                s_ref = 3.0 * t * rng.standard_normal(n)
                g = gamma(t, p, h, n)
                D = diag_Dt(s_ref, t, p, g)
                loss = SmoothedLoss.with_bands(t, p, s_ref, g)
                for _ in range(5):
                    signs = rng.choice([-1.0, 1.0], size=n)
                    s_new = signs * rng.uniform(loss.lower, loss.upper)
                    _, _, second = tilde_eval(loss, h, s_new)
                    msg = f"p={p}, t={t}"
                    self.assertTrue(np.all(second >= D * (1.0 - 1e-10)), msg=msg)
                    self.assertTrue(np.all(second <= kap * D * (1.0 + 1e-10)), msg=msg)


class TestSolverManager(unittest.TestCase):
    def setUp(self):
        self.manager = SolverManager()

    def test_create_each_kind(self):
        expected = {'agd_dense': DenseAGDSolver, 'agd-sparse': SparseAGDSolver, 'katyusha': KatyushaSolver}
        for kind, cls in expected.items():
            self.assertIsInstance(self.manager.create(HomotopyConfig(solver_kind=kind)), cls)
        self.assertEqual(self.manager.kinds, ['agd_dense', 'agd_sparse', 'katyusha'])

    def test_register_refuses_duplicates(self):
        with self.assertLogs('solver_manager', level='ERROR'):
            self.assertFalse(self.manager.register(SolverKind.KATYUSHA, DenseAGDSolver))

    def test_unknown_kind(self):
        with self.assertRaises(ParameterError):
            self.manager.create(HomotopyConfig(solver_kind='newton'))


if __name__ == '__main__':
    unittest.main()
