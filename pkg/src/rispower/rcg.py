"""Riemannian conjugate gradient on the oblique manifold.

Minimizes a smooth objective given as a fused ``mat -> (value, euclidean
gradient)`` callable.  Directions follow Polak-Ribiere+ with projection
transport; steps use Armijo backtracking with an adaptive initial trial
(twice the previously accepted step).  Deterministic given the start point.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import manifold
from .geometry import PhasePoint

__all__ = ["RcgConfig", "RcgReport", "RcgError", "NonFiniteObjectiveError", "pr_plus_beta", "minimize"]

_BETA_RULES = ("pr+", "steepest")


class RcgError(RuntimeError):
    """Solver-level failure."""


class NonFiniteObjectiveError(RcgError):
    """The objective returned a non-finite value or gradient."""


@dataclass(frozen=True)
class RcgConfig:
    """Tuning knobs for one minimization run."""

    max_iters: int = 500
    grad_tol: float = 1e-8
    armijo_c1: float = 1e-4
    backtrack_factor: float = 0.5
    initial_step: float = 1.0
    beta_rule: str = "pr+"
    max_halvings: int = 50
    stop_value: float | None = None  # early exit once the value certifies

    def __post_init__(self) -> None:
        if not 0.0 < self.armijo_c1 < 1.0:
            raise ValueError("armijo_c1 must be in (0, 1)")
        if not 0.0 < self.backtrack_factor < 1.0:
            raise ValueError("backtrack_factor must be in (0, 1)")
        if self.grad_tol <= 0 or self.initial_step <= 0:
            raise ValueError("tolerances and steps must be positive")
        if self.max_iters < 0 or self.max_halvings < 1:
            raise ValueError("iteration budgets must be sensible")
        if self.beta_rule not in _BETA_RULES:
            raise ValueError(f"beta_rule must be one of {_BETA_RULES}")


@dataclass
class RcgReport:
    """Outcome of one minimization: final point, traces, diagnostics."""

    final_point: PhasePoint
    final_value: float
    final_grad_norm: float
    iterations: int
    converged: bool
    stop_reason: str
    value_trace: list[float] = field(default_factory=list)
    grad_norm_trace: list[float] = field(default_factory=list)
    pr_resets: int = 0
    max_column_norm_dev: float = 0.0


def pr_plus_beta(g_new: np.ndarray, g_old: np.ndarray, g_old_transported: np.ndarray) -> float:
    """Polak-Ribiere coefficient, clamped at zero (reset to steepest descent)."""
    denom = manifold.inner(g_old, g_old)
    if denom <= 0.0:
        return 0.0
    return max(0.0, manifold.inner(g_new, g_new - g_old_transported) / denom)


def _check_finite(value: float, grad: np.ndarray) -> None:
    if not np.isfinite(value) or not np.all(np.isfinite(grad)):
        raise NonFiniteObjectiveError("objective returned a non-finite value or gradient")


def minimize(
    objective: Callable[[np.ndarray], tuple[float, np.ndarray]],
    theta0,
    cfg: RcgConfig,
    trace_path=None,
) -> RcgReport:
    """Minimize over the oblique manifold starting from ``theta0``.

    ``theta0`` may be a :class:`PhasePoint` or a raw 2xN matrix with unit
    columns.  If ``trace_path`` is given, a per-iteration CSV of
    (iteration, value, grad_norm) is written on return.
    """
    theta = np.array(theta0.mat if isinstance(theta0, PhasePoint) else theta0, dtype=np.float64)
    value, euclid = objective(theta)
    _check_finite(value, euclid)
    grad = manifold.project_tangent(theta, euclid)
    grad_sq = manifold.inner(grad, grad)
    grad_norm = np.sqrt(grad_sq)

    values = [float(value)]
    grad_norms = [float(grad_norm)]
    max_dev = float(np.abs(manifold.column_norms(theta) - 1.0).max())
    direction = -grad
    prev_step = cfg.initial_step
    iterations = 0
    pr_resets = 0

    while True:
        if grad_norm <= cfg.grad_tol:
            stop_reason = "grad_tol"
            break
        if cfg.stop_value is not None and value <= cfg.stop_value:
            stop_reason = "target"
            break
        if iterations >= cfg.max_iters:
            stop_reason = "max_iters"
            break

        slope = manifold.inner(grad, direction)
        is_steepest = False
        if slope >= 0.0:  # not a descent direction; reset
            direction = -grad
            slope = -grad_sq
            is_steepest = True
            pr_resets += 1

        trial = cfg.initial_step if iterations == 0 else 2.0 * prev_step
        accepted = _armijo(objective, theta, direction, value, slope, trial, cfg)
        if accepted is None and not is_steepest:
            # One retry along steepest descent before giving up.
            direction = -grad
            slope = -grad_sq
            accepted = _armijo(objective, theta, direction, value, slope, trial, cfg)
        if accepted is None:
            stop_reason = "line_search"
            break

        step, cand, cand_value, cand_euclid = accepted
        grad_old, dir_old = grad, direction
        theta = cand
        value = cand_value
        grad = manifold.project_tangent(theta, cand_euclid)
        new_grad_sq = manifold.inner(grad, grad)

        if cfg.beta_rule == "steepest":
            beta = 0.0
        else:
            raw = manifold.inner(grad, grad - manifold.transport(theta, grad_old)) / grad_sq
            beta = max(0.0, raw)
            if raw < 0.0:
                pr_resets += 1
        direction = -grad + beta * manifold.transport(theta, dir_old)

        grad_sq = new_grad_sq
        grad_norm = np.sqrt(grad_sq)
        prev_step = step
        iterations += 1
        values.append(float(value))
        grad_norms.append(float(grad_norm))
        max_dev = max(max_dev, float(np.abs(manifold.column_norms(theta) - 1.0).max()))

    converged = stop_reason in ("grad_tol", "target")
    report = RcgReport(
        final_point=PhasePoint(theta),
        final_value=float(value),
        final_grad_norm=float(grad_norm),
        iterations=iterations,
        converged=converged,
        stop_reason=stop_reason,
        value_trace=values,
        grad_norm_trace=grad_norms,
        pr_resets=pr_resets,
        max_column_norm_dev=max_dev,
    )
    if trace_path is not None:
        _dump_trace(report, trace_path)
    return report


def _armijo(objective, theta, direction, value, slope, trial, cfg):
    """Backtracking search; returns (step, point, value, grad) or None."""
    step = trial
    for _ in range(cfg.max_halvings):
        try:
            cand = manifold.retract(theta, direction, step)
        except manifold.DegenerateStepError:
            step *= cfg.backtrack_factor
            continue
        cand_value, cand_euclid = objective(cand)
        _check_finite(cand_value, cand_euclid)
        if cand_value <= value + cfg.armijo_c1 * step * slope:
            return step, cand, cand_value, cand_euclid
        step *= cfg.backtrack_factor
    return None


def _dump_trace(report: RcgReport, path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "value", "grad_norm"])
        for i, (v, g) in enumerate(zip(report.value_trace, report.grad_norm_trace)):
            writer.writerow([i, repr(v), repr(g)])
