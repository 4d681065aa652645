"""Feasibility objectives and their Euclidean gradients.

For a candidate power P the per-user constraint functions are

    g_k(Theta) = sum_nu erfc(sqrt(P/sigma^2) tr(Theta U_{nu,k})) / 2 - p_k

(the paper's per-user bound minus its target; named ``g`` here because ``h``
is taken by channels).  Feasibility of P means ``max_k g_k <= 0``.  The max
is smoothed with log-sum-exp for the Riemannian solver,

    f0(Theta) = ln sum_k exp(g_k(Theta)),

whose gradient mixes the per-user gradients with softmax weights.  The
initialization objective ``v0`` smooths the max-min trace problem the same
way.  All log-sum-exp evaluations subtract the max before exponentiating;
``exp(-P tr^2 / sigma^2)`` underflowing to 0 is accepted (the true function
is flat there).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erfc

from .geometry import DirectionMatrices, PhasePoint

__all__ = [
    "FeasibilityProblem",
    "constraint_g",
    "constraints_all",
    "f_max",
    "f_smooth",
    "f_smooth_grad",
    "feasibility_value_and_grad",
    "v_init",
    "v_init_grad",
    "init_value_and_grad",
]

_INV_SQRT_PI = 1.0 / np.sqrt(np.pi)


def _as_matrix(theta) -> np.ndarray:
    return theta.mat if isinstance(theta, PhasePoint) else np.asarray(theta, dtype=np.float64)


def _lse(x: np.ndarray) -> tuple[float, np.ndarray]:
    """Overflow-safe log-sum-exp and the matching softmax weights."""
    m = x.max()
    e = np.exp(x - m)
    s = e.sum()
    return float(m + np.log(s)), e / s


@dataclass(frozen=True)
class FeasibilityProblem:
    """Fixed-power feasibility instance: directions, targets, power, noise."""

    dirs: DirectionMatrices
    targets: np.ndarray  # (K,) SEP targets, each in (0, 0.5)
    power: float
    sigma_w: float

    def __post_init__(self) -> None:
        targets = np.asarray(self.targets, dtype=np.float64)
        targets.flags.writeable = False
        object.__setattr__(self, "targets", targets)
        if targets.shape != (self.dirs.k_users,):
            raise ValueError("need one SEP target per user")
        if np.any(targets <= 0.0) or np.any(targets >= 0.5):
            raise ValueError("SEP targets must lie in (0, 0.5)")
        if self.power < 0:
            raise ValueError("power must be nonnegative")
        if self.sigma_w <= 0:
            raise ValueError("noise standard deviation must be positive")

    @property
    def scale(self) -> float:
        """erfc argument scale sqrt(P) / sigma_w."""
        return float(np.sqrt(self.power) / self.sigma_w)


def constraints_all(theta, prob: FeasibilityProblem) -> np.ndarray:
    """All K constraint values g_k at a point."""
    traces = prob.dirs.traces(_as_matrix(theta))
    halves = 0.5 * erfc(prob.scale * traces)
    k = prob.dirs.k_users
    return halves[:k] + halves[k:] - prob.targets


def constraint_g(k: int, theta, prob: FeasibilityProblem) -> float:
    """Constraint value of user ``k`` (0-based)."""
    return float(constraints_all(theta, prob)[k])


def f_max(theta, prob: FeasibilityProblem) -> float:
    """True max-form feasibility value; the point is feasible iff <= 0."""
    return float(constraints_all(theta, prob).max())


def f_smooth(theta, prob: FeasibilityProblem) -> float:
    """Log-sum-exp smoothing of :func:`f_max`."""
    value, _ = _lse(constraints_all(theta, prob))
    return value


def _smooth_value_grad(mat: np.ndarray, prob: FeasibilityProblem) -> tuple[float, np.ndarray]:
    traces = prob.dirs.traces(mat)
    args = prob.scale * traces
    halves = 0.5 * erfc(args)
    k = prob.dirs.k_users
    g = halves[:k] + halves[k:] - prob.targets
    value, weights = _lse(g)
    # grad g_k = -scale/sqrt(pi) * sum_nu exp(-args^2) U_{nu,k}^T
    boundary = np.exp(-args * args)
    combined = np.concatenate([weights, weights]) * boundary
    grad = (-prob.scale * _INV_SQRT_PI) * prob.dirs.weighted_transpose_sum(combined)
    return value, grad


def f_smooth_grad(theta, prob: FeasibilityProblem) -> np.ndarray:
    """Euclidean gradient of :func:`f_smooth` as a 2xN matrix."""
    return _smooth_value_grad(_as_matrix(theta), prob)[1]


def feasibility_value_and_grad(
    prob: FeasibilityProblem,
) -> Callable[[np.ndarray], tuple[float, np.ndarray]]:
    """Fused (value, gradient) callable for the Riemannian solver."""

    def fun(mat: np.ndarray) -> tuple[float, np.ndarray]:
        return _smooth_value_grad(mat, prob)

    return fun


def _init_value_grad(mat: np.ndarray, dirs: DirectionMatrices) -> tuple[float, np.ndarray]:
    traces = dirs.traces(mat)
    value, weights = _lse(-traces)
    return value, -dirs.weighted_transpose_sum(weights)


def v_init(theta, dirs: DirectionMatrices) -> float:
    """Smoothed max-min-trace objective ``ln sum_j exp(-tr(Theta U_j))``."""
    return _init_value_grad(_as_matrix(theta), dirs)[0]


def v_init_grad(theta, dirs: DirectionMatrices) -> np.ndarray:
    """Euclidean gradient of :func:`v_init` as a 2xN matrix."""
    return _init_value_grad(_as_matrix(theta), dirs)[1]


def init_value_and_grad(
    dirs: DirectionMatrices,
) -> Callable[[np.ndarray], tuple[float, np.ndarray]]:
    """Fused (value, gradient) callable for the initialization solve."""

    def fun(mat: np.ndarray) -> tuple[float, np.ndarray]:
        return _init_value_grad(mat, dirs)

    return fun
