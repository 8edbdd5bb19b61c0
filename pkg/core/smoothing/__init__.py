from .smoothed_loss import (
    SmoothedLoss, evaluate, evaluate_extended, eval_scalar, eval_extended,
    build_intervals, tilde_eval, uniform_gap, true_derivative,
)

__all__ = [
    'SmoothedLoss', 'evaluate', 'evaluate_extended', 'eval_scalar', 'eval_extended',
    'build_intervals', 'tilde_eval', 'uniform_gap', 'true_derivative',
]
