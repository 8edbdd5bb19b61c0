from dataclasses import asdict, dataclass, fields
from typing import Dict, List, Optional

from core.utils.exceptions import ParameterError
from core.utils.validators import Validators


@dataclass
class HomotopyConfig:
    """Homotopy run configuration"""

    # Accuracy
    epsilon: float = 1e-6                     # Target additive objective error
    inner_tolerance_exponent: int = 6         # Inner solves reach gap ratio n^-exponent

    # Inner solver
    solver_kind: str = 'agd_dense'            # agd_dense, agd_sparse or katyusha
    agd_cap_factor: float = 100.0             # AGD iteration cap multiplier
    katyusha_cap_factor: float = 100.0        # Katyusha iteration cap multiplier
    batch_size: Optional[int] = None          # None selects the batch from n, d, nnz, kappa

    # Sketching
    sparsify_oversample: float = 4.0          # Row sample multiplier
    sparsify_retries: int = 8                 # Seeds tried before W = D

    # Safety and reproducibility
    max_phases: int = 100000
    seed: int = 0

    @classmethod
    def from_dict(cls, config_dict: Dict) -> 'HomotopyConfig':
        """Create HomotopyConfig from dictionary, ignoring unknown keys"""
        known = {f.name for f in fields(cls)}
        values = {key: value for key, value in config_dict.items() if key in known}
        if 'solver_kind' in values:
            values['solver_kind'] = Validators.normalize_solver_kind(values['solver_kind'])
        return cls(**values)

    def to_dict(self) -> Dict:
        """Convert HomotopyConfig to dictionary"""
        return asdict(self)

    def validate(self) -> List[str]:
        """Validate homotopy configuration"""
        errors = Validators.validate_solver_config(self.to_dict())

        if not Validators.validate_positive(self.agd_cap_factor):
            errors.append("agd_cap_factor must be positive")
        if not Validators.validate_positive(self.katyusha_cap_factor):
            errors.append("katyusha_cap_factor must be positive")

        return errors

    def check(self) -> 'HomotopyConfig':
        """Raise ParameterError listing every validation failure"""
        errors = self.validate()
        if errors:
            raise ParameterError(f"Configuration validation failed: {', '.join(errors)}")
        return self

    def inner_ratio(self, n: int) -> float:
        """Inner gap ratio max(n, 10)^-exponent"""
        return float(max(n, 10)) ** (-self.inner_tolerance_exponent)
