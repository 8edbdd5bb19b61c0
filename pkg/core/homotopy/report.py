# core/homotopy/report.py

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np


@dataclass
class PhaseRecord:
    k: int
    t_k: float
    t_next: float
    inner_iterations: int
    objective: float
    kkt_residual: float
    wall_ms: float
    gamma: float
    kappa: float
    contained: bool
    preconditioner: str


@dataclass
class SolveReport:
    """Outcome of a homotopy run; serialises to the JSON report schema"""
    n: int
    d: int
    p: float
    nnz: int
    solver_kind: str
    seed: int
    epsilon: float
    t0: float = 0.0
    t_end: float = 0.0
    phase_bound: float = 0.0
    phases: List[PhaseRecord] = field(default_factory=list)
    final_x: Optional[np.ndarray] = None
    final_objective: Optional[float] = None
    total_wall_ms: float = 0.0
    converged: bool = False
    error: Optional[str] = None

    @property
    def inner_iterations(self) -> List[int]:
        return [phase.inner_iterations for phase in self.phases]

    @property
    def schedule(self) -> List[float]:
        return [phase.t_k for phase in self.phases]

    def to_dict(self, x_path: Optional[str] = None) -> Dict:
        """JSON-ready dictionary; final_x inline unless a path is given"""
        if x_path is not None:
            final_x = str(x_path)
        elif self.final_x is not None:
            final_x = [float(v) for v in self.final_x]
        else:
            final_x = None

        return {
            'problem': {'n': int(self.n), 'd': int(self.d), 'p': float(self.p), 'nnz': int(self.nnz)},
            't0': float(self.t0),
            't_end': float(self.t_end),
            'epsilon': float(self.epsilon),
            'phase_bound': float(self.phase_bound),
            'phases': [
                {key: (bool(v) if isinstance(v, (bool, np.bool_)) else
                       v if isinstance(v, str) else
                       int(v) if key in ('k', 'inner_iterations') else float(v))
                 for key, v in asdict(phase).items()}
                for phase in self.phases
            ],
            'solver_kind': self.solver_kind,
            'final_x': final_x,
            'final_objective': None if self.final_objective is None else float(self.final_objective),
            'total_wall_ms': float(self.total_wall_ms),
            'seed': int(self.seed),
            'converged': bool(self.converged),
            'error': self.error,
        }

    def save(self, path, x_path: Optional[str] = None):
        """Write the report as JSON"""
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w') as f:
            json.dump(self.to_dict(x_path), f, indent=2)
