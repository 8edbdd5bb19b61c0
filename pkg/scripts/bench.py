#!/usr/bin/env python3
"""Per-phase inner iteration counts for scaling analysis."""

import concurrent.futures
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from config.solver_config import HomotopyConfig
from core.homotopy.homotopy_engine import run
from core.problem.generator import generate_random
from core.utils.logger import setup_logger
from core.utils.metrics import SolveMetrics

logger = setup_logger('bench')

BENCH_COLUMNS = ['p', 'n', 'd', 'phase', 'inner_iters', 'wall_ms']


@dataclass(frozen=True)
class BenchTask:
    p: float
    n: int
    d: int
    trial: int
    seed: int
    epsilon: float
    solver_kind: str


def _run_task(task: BenchTask) -> List[Dict]:
    """One homotopy run; returns its per-phase rows"""
    problem = generate_random(task.n, task.d, task.p, seed=task.seed)
    config = HomotopyConfig(epsilon=task.epsilon, solver_kind=task.solver_kind, seed=task.seed)
    report = run(problem, config)
    return [
        {'p': task.p, 'n': task.n, 'd': task.d, 'phase': phase.k,
         'inner_iters': phase.inner_iterations, 'wall_ms': phase.wall_ms}
        for phase in report.phases
    ]


class BenchmarkEngine:
    def __init__(self, p_list: Sequence[float], n_list: Sequence[int], d: int, trials: int, seed: int,
                 epsilon: float = 1e-6, solver_kind: str = 'agd_dense', max_workers: int = 1):
        """Initialize benchmark over every (p, n, trial) combination"""
        self.p_list = list(p_list)
        self.n_list = list(n_list)
        self.d = d
        self.trials = trials
        self.seed = seed
        self.epsilon = epsilon
        self.solver_kind = solver_kind
        self.max_workers = max(int(max_workers), 1)

    def tasks(self) -> List[BenchTask]:
        return [
            BenchTask(p, n, self.d, trial, self.seed + trial, self.epsilon, self.solver_kind)
            for p in self.p_list for n in self.n_list for trial in range(self.trials)
        ]

    def run(self) -> pd.DataFrame:
        """Run all trials; rows ordered by (p, n, trial, phase) whatever the completion order"""
        try:
            tasks = self.tasks()
            logger.info(f"Running {len(tasks)} benchmark trials on {self.max_workers} workers")
            results: Dict[int, List[Dict]] = {}

            if self.max_workers == 1:
                for i, task in enumerate(tasks):
                    results[i] = _run_task(task)
            else:
                with concurrent.futures.ProcessPoolExecutor(max_workers=self.max_workers) as executor:
                    futures = {executor.submit(_run_task, task): i for i, task in enumerate(tasks)}
                    for future in concurrent.futures.as_completed(futures):
                        results[futures[future]] = future.result()

            rows = [row for i in range(len(tasks)) for row in results[i]]
            return pd.DataFrame(rows, columns=BENCH_COLUMNS)

        except Exception as e:
            logger.error(f"Error running benchmark: {e}")
            raise

    @staticmethod
    def save(frame: pd.DataFrame, path: Optional[str]) -> str:
        """Write the CSV (fixed header); returns the text when no path is given"""
        text = frame.to_csv(index=False, columns=BENCH_COLUMNS, float_format='%.17g')
        if path:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            Path(path).write_text(text)
            logger.info(f"Wrote {len(frame)} rows to {path}")
        return text

    @staticmethod
    def summary(frame: pd.DataFrame) -> pd.DataFrame:
        return SolveMetrics.scaling_summary(frame)
