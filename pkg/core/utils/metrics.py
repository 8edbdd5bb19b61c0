# core/utils/metrics.py

from typing import Dict, Iterable, List

import numpy as np
import pandas as pd

PHASE_COLUMNS = ['k', 't_k', 'inner_iterations', 'objective', 'kkt_residual', 'wall_ms']


class SolveMetrics:
    @staticmethod
    def phase_table(report) -> pd.DataFrame:
        """One row per phase of a SolveReport"""
        rows = [vars(phase) for phase in report.phases]
        if not rows:
            return pd.DataFrame(columns=PHASE_COLUMNS)
        return pd.DataFrame(rows)

    @staticmethod
    def schedule_ratios(report) -> np.ndarray:
        """t_{k+1} / t_k between consecutive phases"""
        schedule = np.asarray(report.schedule, dtype=float)
        if schedule.size < 2:
            return np.zeros(0)
        return schedule[1:] / schedule[:-1]

    @staticmethod
    def median_iterations(report) -> float:
        iterations = report.inner_iterations
        return float(np.median(iterations)) if iterations else 0.0

    @staticmethod
    def loglog_slope(sizes: Iterable[float], values: Iterable[float]) -> float:
        """Least-squares slope of log(value) against log(size)"""
        x = np.log(np.asarray(list(sizes), dtype=float))
        y = np.log(np.maximum(np.asarray(list(values), dtype=float), 1.0))
        if x.size < 2 or np.ptp(x) == 0:
            return 0.0
        slope, _ = np.polyfit(x, y, 1)
        return float(slope)

    @staticmethod
    def reference_exponent(p: float) -> float:
        """Growth exponent |1/2 - 1/p| of the per-phase iteration count in n"""
        return abs(0.5 - 1.0 / p)

    @staticmethod
    def scaling_summary(frame: pd.DataFrame) -> pd.DataFrame:
        """Median per-phase iterations per (p, n) with the fitted log-log slope per p"""
        if frame.empty:
            return pd.DataFrame(columns=['p', 'n', 'median_inner_iters', 'slope', 'reference'])
        medians = (frame.groupby(['p', 'n'])['inner_iters'].median()
                   .rename('median_inner_iters').reset_index())
        slopes: Dict[float, float] = {
            p: SolveMetrics.loglog_slope(group['n'], group['median_inner_iters'])
            for p, group in medians.groupby('p')
        }
        medians['slope'] = medians['p'].map(slopes)
        medians['reference'] = medians['p'].map(SolveMetrics.reference_exponent)
        return medians

    @staticmethod
    def summarize(report) -> Dict:
        """Headline numbers of a run"""
        iterations: List[int] = report.inner_iterations
        return {
            'phases': len(report.phases),
            'phase_bound': report.phase_bound,
            'total_inner_iterations': int(sum(iterations)),
            'median_inner_iterations': SolveMetrics.median_iterations(report),
            'max_kkt_residual': max((ph.kkt_residual for ph in report.phases), default=0.0),
            'containment_violations': sum(1 for ph in report.phases if not ph.contained),
            'final_objective': report.final_objective,
            'total_wall_ms': report.total_wall_ms,
        }
