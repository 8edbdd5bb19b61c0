# core/utils/validators.py

import math
from typing import Dict, List

SOLVER_KINDS = ['agd_dense', 'agd_sparse', 'katyusha']


class Validators:
    @staticmethod
    def validate_exponent(p: float) -> bool:
        """p must be a finite real greater than one"""
        return isinstance(p, (int, float)) and math.isfinite(p) and p > 1

    @staticmethod
    def validate_positive(value: float) -> bool:
        """Validate a strictly positive finite real"""
        return isinstance(value, (int, float)) and math.isfinite(value) and value > 0

    @staticmethod
    def validate_density(density: float) -> bool:
        """Validate a sampling density in (0, 1]"""
        return isinstance(density, (int, float)) and 0 < density <= 1

    @staticmethod
    def validate_count(count: int) -> bool:
        """Validate a positive integer"""
        return isinstance(count, int) and not isinstance(count, bool) and count >= 1

    @staticmethod
    def validate_step(h: float, p: float) -> bool:
        """Validate a homotopy step 0 <= h <= 1/(2p)"""
        return 0 <= h <= 1.0 / (2.0 * p) + 1e-15

    @staticmethod
    def normalize_solver_kind(kind: str) -> str:
        """Map CLI spellings (agd-dense) onto config spellings (agd_dense)"""
        return str(kind).strip().lower().replace('-', '_')

    @staticmethod
    def validate_solver_kind(kind: str) -> bool:
        """Validate inner solver kind"""
        return Validators.normalize_solver_kind(kind) in SOLVER_KINDS

    @staticmethod
    def validate_solver_config(config: Dict) -> List[str]:
        """Validate solver configuration parameters"""
        errors = []

        required_fields = ['epsilon', 'solver_kind', 'inner_tolerance_exponent', 'max_phases', 'seed']
        for field in required_fields:
            if field not in config:
                errors.append(f"Missing required config field: {field}")

        if 'epsilon' in config and not Validators.validate_positive(config['epsilon']):
            errors.append("epsilon must be positive")

        if 'solver_kind' in config and not Validators.validate_solver_kind(config['solver_kind']):
            errors.append(f"Invalid solver kind: {config['solver_kind']}")

        if 'inner_tolerance_exponent' in config and \
                not Validators.validate_count(config['inner_tolerance_exponent']):
            errors.append("inner_tolerance_exponent must be a positive integer")

        if 'max_phases' in config and not Validators.validate_count(config['max_phases']):
            errors.append("max_phases must be at least 1")

        if 'seed' in config and not isinstance(config['seed'], int):
            errors.append("seed must be an integer")

        if 'sparsify_oversample' in config and not Validators.validate_positive(config['sparsify_oversample']):
            errors.append("sparsify_oversample must be positive")

        if 'sparsify_retries' in config and not Validators.validate_count(config['sparsify_retries']):
            errors.append("sparsify_retries must be at least 1")

        batch = config.get('batch_size')
        if batch is not None and not Validators.validate_count(batch):
            errors.append("batch_size must be a positive integer or null")

        return errors

    @staticmethod
    def validate_generator_params(n: int, d: int, p: float, density: float) -> List[str]:
        """Validate synthetic instance parameters"""
        errors = []

        if not Validators.validate_count(n) or not Validators.validate_count(d):
            errors.append("n and d must be positive integers")
        elif n < d:
            errors.append(f"generator needs n >= d, got n={n}, d={d}")

        if not Validators.validate_exponent(p):
            errors.append(f"p must be finite and > 1, got {p}")

        if not Validators.validate_density(density):
            errors.append(f"density must lie in (0, 1], got {density}")

        return errors
