# core/smoothing/smoothed_loss.py
"""
Smoothed power loss f_t and its quadratic extension.

    f_t(s) = (p/2) t^(p-2) s^2          if |s| <= t
           = |s|^p + (p/2 - 1) t^p      otherwise

f_t is quadratic on [-t, t] and C^1 in both s and t. The quadratic extension
f_{t,l,u} agrees with f_t on [l, u] and continues it by its second-order Taylor
polynomial at the nearer endpoint, so its curvature is bounded globally by the
curvature of f_t on [l, u].
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..utils.exceptions import DimensionError, ParameterError


def evaluate(t: float, p: float, s) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorised f_t.

    Returns:
        value, first derivative, second derivative, and d/dt of the first derivative
    """
    s = np.asarray(s, dtype=float)
    a = np.abs(s)
    inside = a <= t

    value = np.empty_like(s)
    first = np.empty_like(s)
    second = np.empty_like(s)
    dt_first = np.zeros_like(s)

    quad = p * t ** (p - 2.0)
    value[inside] = 0.5 * quad * s[inside] ** 2
    first[inside] = quad * s[inside]
    second[inside] = quad
    dt_first[inside] = p * (p - 2.0) * t ** (p - 3.0) * s[inside]

    out = ~inside
    a_out = a[out]
    value[out] = a_out ** p + (0.5 * p - 1.0) * t ** p
    first[out] = p * a_out ** (p - 2.0) * s[out]
    second[out] = p * (p - 1.0) * a_out ** (p - 2.0)
    return value, first, second, dt_first


def eval_scalar(t: float, p: float, s: float) -> Tuple[float, float, float, float]:
    """f_t at a single point: (value, first, second, dt_of_first)"""
    value, first, second, dt_first = evaluate(t, p, np.array([s], dtype=float))
    return float(value[0]), float(first[0]), float(second[0]), float(dt_first[0])


def evaluate_extended(t: float, p: float, lower, upper, s) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised quadratic extension f_{t,l,u}(s) on the real line"""
    s = np.asarray(s, dtype=float)
    lower = np.broadcast_to(np.asarray(lower, dtype=float), s.shape)
    upper = np.broadcast_to(np.asarray(upper, dtype=float), s.shape)

    value, first, second, _ = evaluate(t, p, s)

    above = s > upper
    if np.any(above):
        u = upper[above]
        fu, du, su, _ = evaluate(t, p, u)
        delta = s[above] - u
        value[above] = fu + du * delta + 0.5 * su * delta ** 2
        first[above] = du + su * delta
        second[above] = su

    below = s < lower
    if np.any(below):
        lo = lower[below]
        fl, dl, sl, _ = evaluate(t, p, lo)
        delta = s[below] - lo
        value[below] = fl + dl * delta + 0.5 * sl * delta ** 2
        first[below] = dl + sl * delta
        second[below] = sl

    return value, first, second


def eval_extended(t: float, p: float, lower: float, upper: float, s: float) -> Tuple[float, float, float]:
    """Scalar quadratic extension of f_t on [lower, upper]"""
    if lower > upper:
        raise ParameterError(f"extension interval is empty: lower={lower} > upper={upper}")
    if lower < 0:
        raise ParameterError(f"extension interval must start at a nonnegative value, got {lower}")
    value, first, second = evaluate_extended(t, p, lower, upper, np.array([s], dtype=float))
    return float(value[0]), float(first[0]), float(second[0])


def build_intervals(s_ref, gamma: float, p: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-coordinate band [l_i, u_i] in |s| matching the neighborhood N_{s_ref}(gamma).

    l_i = max(0, |s_i|^(p/2) - gamma)^(2/p),  u_i = (|s_i|^(p/2) + gamma)^(2/p)
    """
    if gamma < 0:
        raise ParameterError(f"gamma must be nonnegative, got {gamma}")
    level = np.abs(np.asarray(s_ref, dtype=float)) ** (0.5 * p)
    lower = np.maximum(level - gamma, 0.0) ** (2.0 / p)
    upper = (level + gamma) ** (2.0 / p)
    return lower, upper


def uniform_gap(t: float, p: float) -> float:
    """sup_s |f_t(s) - |s|^p| = |p/2 - 1| t^p"""
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    return abs(0.5 * p - 1.0) * t ** p


def true_derivative(p: float, s) -> np.ndarray:
    """Derivative of |s|^p, i.e. p sign(s) |s|^(p-1)"""
    s = np.asarray(s, dtype=float)
    return p * np.sign(s) * np.abs(s) ** (p - 1.0)


@dataclass(frozen=True)
class SmoothedLoss:
    """
    Smoothing radius t and exponent p, optionally with extension bands.

    With bands present the loss is tilde-f: coordinate i is the quadratic
    extension of f_{(1-h)t} on [lower_i, upper_i], applied to |s_i| with the
    sign carried to the gradient.
    """
    t: float
    p: float
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.t > 0:
            raise ParameterError(f"smoothing radius must be positive, got {self.t}")
        if not self.p > 1:
            raise ParameterError(f"p must exceed 1, got {self.p}")
        if (self.lower is None) != (self.upper is None):
            raise ParameterError("lower and upper bands must be given together")
        if self.lower is not None:
            if self.lower.shape != self.upper.shape:
                raise DimensionError("lower and upper bands differ in length", obj='intervals')
            if np.any(self.lower < 0) or np.any(self.lower > self.upper):
                raise ParameterError("bands need 0 <= lower <= upper")

    @classmethod
    def with_bands(cls, t: float, p: float, s_ref, gamma: float) -> 'SmoothedLoss':
        lower, upper = build_intervals(s_ref, gamma, p)
        return cls(t=t, p=p, lower=lower, upper=upper)

    @property
    def has_intervals(self) -> bool:
        return self.lower is not None

    @property
    def intervals(self) -> List[Tuple[float, float]]:
        if not self.has_intervals:
            return []
        return list(zip(self.lower.tolist(), self.upper.tolist()))

    def radius(self, h: float) -> float:
        return (1.0 - h) * self.t

    def terms(self, h: float, s, index: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coordinatewise (value, gradient, second derivative) of tilde-f, optionally on a row subset"""
        if not self.has_intervals:
            raise ParameterError("tilde-f needs extension intervals")
        s = np.asarray(s, dtype=float)
        lower, upper = self.lower, self.upper
        if index is not None:
            lower, upper = lower[index], upper[index]
        if lower.shape != s.shape:
            raise DimensionError(f"{lower.shape[0]} intervals for {s.shape[0]} residuals", obj='s')
        value, first, second = evaluate_extended(self.radius(h), self.p, lower, upper, np.abs(s))
        return value, np.sign(s) * first, second


def tilde_eval(loss: SmoothedLoss, h: float, s) -> Tuple[float, np.ndarray, np.ndarray]:
    """tilde-f at s: (value, gradient, diagonal Hessian)"""
    value, gradient, diag_hessian = loss.terms(h, s)
    return float(np.sum(value)), gradient, diag_hessian
