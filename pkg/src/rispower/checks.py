"""Built-in self checks: gradients, smoothing bounds, manifold, solver.

These mirror the most failure-prone invariants and are exposed through the
CLI/service so a deployment can verify its numerical stack.  Each check
returns a pass/fail outcome with a short detail string; ``grad_hook`` lets a
test harness corrupt the analytic gradient to prove the checks can fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erfcinv

from . import manifold
from .channel import ChannelSet, generate_rayleigh, rotate
from .constellation import PskConstellation, SymbolVector, random_symbols
from .geometry import build_direction_matrices
from .objective import (
    FeasibilityProblem,
    f_max,
    f_smooth,
    f_smooth_grad,
    v_init,
    v_init_grad,
)
from .solver import BisectionConfig, bisect

__all__ = ["CheckOutcome", "run_checks"]

GradHook = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    detail: str
    tolerance: float


def _fd_gradient(fun, mat: np.ndarray, step: float = 1e-6) -> np.ndarray:
    out = np.zeros_like(mat)
    for i in range(mat.shape[0]):
        for n in range(mat.shape[1]):
            plus = mat.copy()
            plus[i, n] += step
            minus = mat.copy()
            minus[i, n] -= step
            out[i, n] = (fun(plus) - fun(minus)) / (2.0 * step)
    return out


# Central differences with step 1e-6 on O(1) values carry ~1e-9 roundoff;
# the absolute term keeps that noise from dominating near-zero entries.
FD_ATOL = 1e-8


def gradcheck_margin(analytic: np.ndarray, reference: np.ndarray, rel_tol: float) -> float:
    """Worst ratio |a - fd| / (rel_tol |fd| + atol); passes when <= 1."""
    gap = np.abs(analytic - reference)
    return float((gap / (rel_tol * np.abs(reference) + FD_ATOL)).max())


def _random_problem(rng: np.random.Generator, n: int = 8, k: int = 3):
    c = PskConstellation(4)
    channels = generate_rayleigh(n, k, rng)
    symbols = random_symbols(k, rng, c)
    dirs = build_direction_matrices(rotate(channels, symbols, c), c.half_angle)
    targets = np.full(k, 1e-2)
    return FeasibilityProblem(dirs, targets, power=2.0, sigma_w=1.0)


def check_gradients(seed: int, rel_tol: float, grad_hook: GradHook | None) -> CheckOutcome:
    """Analytic vs central-finite-difference gradients of f0 and v0."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        prob = _random_problem(rng)
        mat = manifold.random_point(prob.dirs.n_elements, rng)
        for fun, grad in (
            (lambda m: f_smooth(m, prob), f_smooth_grad(mat, prob)),
            (lambda m: v_init(m, prob.dirs), v_init_grad(mat, prob.dirs)),
        ):
            if grad_hook is not None:
                grad = grad_hook(grad)
            worst = max(worst, gradcheck_margin(grad, _fd_gradient(fun, mat), rel_tol))
    return CheckOutcome(
        "gradient_finite_difference", worst <= 1.0, f"worst margin {worst:.3e}", rel_tol
    )


def check_lse_sandwich(seed: int) -> CheckOutcome:
    """max g <= smoothed <= max g + ln K on random points."""
    rng = np.random.default_rng(seed)
    slack = 1e-12
    violations = 0
    for _ in range(200):
        prob = _random_problem(rng)
        mat = manifold.random_point(prob.dirs.n_elements, rng)
        lo = f_max(mat, prob)
        mid = f_smooth(mat, prob)
        hi = lo + math.log(prob.dirs.k_users)
        if mid < lo - slack or mid > hi + slack:
            violations += 1
    return CheckOutcome("lse_sandwich", violations == 0, f"{violations} violations", slack)


def check_retraction(seed: int) -> CheckOutcome:
    """Unit columns after retraction and second-order step error decay."""
    rng = np.random.default_rng(seed)
    tol = 1e-10
    worst_norm = 0.0
    ratio_ok = True
    for _ in range(20):
        theta = manifold.random_point(16, rng)
        xi = manifold.project_tangent(theta, rng.standard_normal((2, 16)))
        out = manifold.retract(theta, xi, 0.3)
        worst_norm = max(worst_norm, float(np.abs(manifold.column_norms(out) - 1.0).max()))
        errs = [
            np.linalg.norm(manifold.retract(theta, xi, t) - (theta + t * xi)) for t in (1e-2, 1e-3)
        ]
        # One decade in t should shrink the gap by roughly two decades.
        ratio_ok = ratio_ok and errs[1] > 0 and 30.0 < errs[0] / errs[1] < 300.0
    passed = worst_norm <= tol and ratio_ok
    return CheckOutcome(
        "manifold_retraction", passed, f"max column dev {worst_norm:.2e}", tol
    )


def check_solver_closed_form(seed: int) -> CheckOutcome:
    """Single-user scalar instance against the erfcinv closed form."""
    target = 1e-3
    expected = 2.0 * float(erfcinv(target)) ** 2
    c = PskConstellation(4)
    channels = ChannelSet.all_ones(1, 1)
    symbols = SymbolVector(np.array([0]), 4)
    cfg = BisectionConfig(eps_tol=1e-6)
    result = bisect(channels, symbols, c, np.array([target]), cfg, np.random.default_rng(seed))
    rel = abs(result.p_opt - expected) / expected
    return CheckOutcome(
        "solver_closed_form", result.feasible and rel <= 1e-3, f"rel err {rel:.3e}", 1e-3
    )


def run_checks(
    seed: int = 0, grad_rel_tol: float = 1e-5, grad_hook: GradHook | None = None
) -> list[CheckOutcome]:
    """Run the whole self-check suite; returns one outcome per check."""
    return [
        check_gradients(seed, grad_rel_tol, grad_hook),
        check_lse_sandwich(seed + 1),
        check_retraction(seed + 2),
        check_solver_closed_form(seed + 3),
    ]
