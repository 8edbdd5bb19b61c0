# tests/test_config.py

import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from config.settings import Settings
from config.solver_config import HomotopyConfig
from core.utils.exceptions import ParameterError


class TestHomotopyConfig(unittest.TestCase):
    def setUp(self):
        self.config = HomotopyConfig()

    def test_defaults_are_valid(self):
        self.assertEqual(self.config.validate(), [])
        self.assertEqual(self.config.solver_kind, 'agd_dense')
        self.assertEqual(self.config.inner_tolerance_exponent, 6)

    def test_validation_errors(self):
        config = HomotopyConfig(epsilon=0.0, max_phases=0, solver_kind='newton', batch_size=0)
        errors = config.validate()
        self.assertIn("epsilon must be positive", errors)
        self.assertIn("max_phases must be at least 1", errors)
        self.assertIn("Invalid solver kind: newton", errors)
        self.assertIn("batch_size must be a positive integer or null", errors)
        with self.assertRaises(ParameterError):
            config.check()

    def test_from_dict(self):
        config = HomotopyConfig.from_dict({'solver_kind': 'Agd-Sparse', 'seed': 3, 'unknown': 1})
        self.assertEqual(config.solver_kind, 'agd_sparse')
        self.assertEqual(config.seed, 3)
        self.assertEqual(HomotopyConfig.from_dict(config.to_dict()), config)

    def test_inner_ratio(self):
        self.assertAlmostEqual(self.config.inner_ratio(100), 1e-12, places=24)
        self.assertAlmostEqual(self.config.inner_ratio(2), 1e-6, places=18)


class TestSettings(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.settings = Settings(Path(self.tmp.name))
        with open(Path(self.tmp.name) / 'solver_config.json', 'w') as f:
            json.dump(HomotopyConfig(epsilon=1e-5).to_dict(), f)

    def tearDown(self):
        self.tmp.cleanup()

    def test_overrides(self):
        config = self.settings.get_solver_config(epsilon=None, solver_kind='katyusha', seed=9)
        self.assertEqual(config.epsilon, 1e-5)
        self.assertEqual(config.solver_kind, 'katyusha')
        self.assertEqual(config.seed, 9)

    def test_invalid_override(self):
        with self.assertRaises(ParameterError):
            self.settings.get_solver_config(epsilon=-1.0)

    def test_save_replaces_cached_config(self):
        self.settings.load_config()
        self.settings.save_config(HomotopyConfig(epsilon=1e-3, solver_kind='agd_sparse'))
        self.assertEqual(self.settings.get_solver_config().solver_kind, 'agd_sparse')

    def test_invalid_file_is_rejected(self):
        with open(Path(self.tmp.name) / 'broken.json', 'w') as f:
            json.dump({'epsilon': -1}, f)
        with self.assertLogs('settings', level='ERROR'):
            with self.assertRaises(ValueError):
                self.settings.load_config('broken')

    def test_threads_from_environment(self):
        with mock.patch.dict(os.environ, {'LP_HOMOTOPY_THREADS': '3'}):
            self.assertEqual(self.settings.threads, 3)
        with mock.patch.dict(os.environ, {'LP_HOMOTOPY_THREADS': 'many'}):
            with self.assertLogs('settings', level='WARNING'):
                self.assertGreaterEqual(self.settings.threads, 1)

    def test_workers_capped_by_threads(self):
        with mock.patch.dict(os.environ, {'LP_HOMOTOPY_THREADS': '3'}):
            self.assertEqual(self.settings.workers(), 3)
            self.assertEqual(self.settings.workers(8), 3)
            self.assertEqual(self.settings.workers(2), 2)


if __name__ == '__main__':
    unittest.main()
