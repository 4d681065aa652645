"""Outer bisection over transmit power with an RCG feasibility oracle.

A power P is classified feasible when minimizing the smoothed objective from
a warm-started point yields ``f_max <= 0`` (the check always uses the true
max form, never the smoothed one).  Bisection keeps the upper end of the
bracket certified feasible and returns it, together with the phase vector
certified at that power; the initial upper bound is probed first and, if
infeasible, optionally doubled a few times before declaring the instance
infeasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import manifold
from .channel import ChannelSet, rotate
from .constellation import PskConstellation, SymbolVector
from .geometry import DirectionMatrices, PhasePoint, build_direction_matrices
from .objective import (
    FeasibilityProblem,
    f_max,
    feasibility_value_and_grad,
    init_value_and_grad,
)
from .rcg import NonFiniteObjectiveError, RcgConfig, minimize

__all__ = [
    "BisectionConfig",
    "BisectionStep",
    "OracleOutcome",
    "SolveResult",
    "initialize_point",
    "feasibility_oracle",
    "bisect_prepared",
    "bisect",
    "SOLVE_CSV_FIELDS",
    "solve_csv_row",
]


@dataclass(frozen=True)
class BisectionConfig:
    """Bracket, tolerance, and inner-solver settings for one solve."""

    p_lower: float = 0.0
    p_upper: float = 100.0
    eps_tol: float = 1e-7
    i_max: int = 60
    rcg: RcgConfig = field(default_factory=lambda: RcgConfig(max_iters=500, grad_tol=1e-8))
    rcg_init: RcgConfig = field(default_factory=lambda: RcgConfig(max_iters=200, grad_tol=1e-8))
    warm_start: bool = True
    repair_doublings: int = 4  # 0 disables bracket repair (strict bracket mode)
    early_stop: bool = True  # stop the inner solve once the smoothed value certifies

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_lower < self.p_upper:
            raise ValueError("bracket must satisfy 0 <= p_lower < p_upper")
        if self.eps_tol <= 0:
            raise ValueError("eps_tol must be positive")
        if self.i_max < 1:
            raise ValueError("i_max must be >= 1")
        if self.repair_doublings < 0:
            raise ValueError("repair_doublings must be >= 0")


class BisectionStep(NamedTuple):
    """One oracle call: probed power, true max-form value, branch taken."""

    power: float
    f_value: float
    branch: str  # "probe" | "repair" | "feasible" | "infeasible"


class OracleOutcome(NamedTuple):
    feasible: bool
    theta: np.ndarray  # 2xN certified/best point
    f_value: float
    diagnostic: str | None


@dataclass
class SolveResult:
    """Outcome of one power-minimization solve."""

    p_opt: float
    theta_opt: np.ndarray  # (N,) complex, unit modulus
    feasible: bool
    iterations: int
    trace: list[BisectionStep]
    p_n_db: float
    diagnostic: str | None = None

    @property
    def oracle_calls(self) -> int:
        return len(self.trace)


def initialize_point(
    dirs: DirectionMatrices, cfg: BisectionConfig, rng: np.random.Generator
) -> PhasePoint:
    """Smoothed max-min-trace solve from a random manifold start.

    Lands inside the all-nonnegative-trace region whenever that region meets
    the manifold; otherwise the downstream feasibility checks simply fail.
    """
    start = manifold.random_point(dirs.n_elements, rng)
    report = minimize(init_value_and_grad(dirs), start, cfg.rcg_init)
    return report.final_point


def feasibility_oracle(
    power: float,
    dirs: DirectionMatrices,
    targets: np.ndarray,
    sigma_w: float,
    theta_init,
    cfg: BisectionConfig,
) -> OracleOutcome:
    """Classify one power level by minimizing the smoothed objective.

    Feasibility is judged on the true max form at the returned point.  A
    smoothed value at or below zero already certifies feasibility (the
    smoothing upper-bounds the max), so the inner solve may stop early on it.
    """
    prob = FeasibilityProblem(dirs, targets, power, sigma_w)
    rcg_cfg = replace(cfg.rcg, stop_value=0.0) if cfg.early_stop else cfg.rcg
    init_mat = theta_init.mat if isinstance(theta_init, PhasePoint) else theta_init
    try:
        report = minimize(feasibility_value_and_grad(prob), init_mat, rcg_cfg)
    except NonFiniteObjectiveError as exc:
        return OracleOutcome(False, np.array(init_mat), math.inf, str(exc))
    theta = report.final_point.mat
    value = f_max(theta, prob)
    return OracleOutcome(value <= 0.0, theta, value, None)


def bisect_prepared(
    dirs: DirectionMatrices,
    targets: np.ndarray,
    sigma_w: float,
    theta0: PhasePoint,
    cfg: BisectionConfig,
) -> SolveResult:
    """Bisection given precomputed direction matrices and an initial point."""
    targets = np.asarray(targets, dtype=np.float64)
    noise_var = sigma_w * sigma_w
    trace: list[BisectionStep] = []

    # Certify the upper end of the bracket before bisecting.
    p_hi = cfg.p_upper
    outcome = feasibility_oracle(p_hi, dirs, targets, sigma_w, theta0, cfg)
    trace.append(BisectionStep(p_hi, outcome.f_value, "probe"))
    repairs = 0
    while not outcome.feasible and repairs < cfg.repair_doublings:
        p_hi *= 2.0
        repairs += 1
        outcome = feasibility_oracle(p_hi, dirs, targets, sigma_w, theta0, cfg)
        trace.append(BisectionStep(p_hi, outcome.f_value, "repair"))
    if not outcome.feasible:
        return SolveResult(
            p_opt=math.nan,
            theta_opt=PhasePoint(outcome.theta).to_complex(),
            feasible=False,
            iterations=0,
            trace=trace,
            p_n_db=math.nan,
            diagnostic=outcome.diagnostic or "upper power bound is infeasible",
        )

    certified_theta = outcome.theta
    warm: np.ndarray = outcome.theta if cfg.warm_start else theta0.mat
    p_lo = cfg.p_lower
    iterations = 0
    while p_hi - p_lo > cfg.eps_tol and iterations < cfg.i_max:
        mid = 0.5 * (p_hi + p_lo)
        outcome = feasibility_oracle(mid, dirs, targets, sigma_w, warm, cfg)
        if outcome.feasible:
            p_hi = mid
            certified_theta = outcome.theta
            if cfg.warm_start:
                warm = outcome.theta
            trace.append(BisectionStep(mid, outcome.f_value, "feasible"))
        else:
            p_lo = mid
            trace.append(BisectionStep(mid, outcome.f_value, "infeasible"))
        iterations += 1

    return SolveResult(
        p_opt=p_hi,
        theta_opt=PhasePoint(certified_theta).to_complex(),
        feasible=True,
        iterations=iterations,
        trace=trace,
        p_n_db=10.0 * math.log10(p_hi / noise_var),
    )


def bisect(
    channels: ChannelSet,
    symbols: SymbolVector,
    c: PskConstellation,
    targets,
    cfg: BisectionConfig,
    rng: np.random.Generator,
) -> SolveResult:
    """Full solve for one instance: rotate, build directions, init, bisect."""
    targets = np.asarray(targets, dtype=np.float64)
    dirs = build_direction_matrices(rotate(channels, symbols, c), c.half_angle)
    sigma_w = math.sqrt(channels.noise_var)
    theta0 = initialize_point(dirs, cfg, rng)
    return bisect_prepared(dirs, targets, sigma_w, theta0, cfg)


SOLVE_CSV_FIELDS = ["seed", "N", "K", "alpha_s", "tau", "p_opt", "p_n_db", "iterations", "feasible"]


def solve_csv_row(
    result: SolveResult, seed, n_elements: int, k_users: int, order: int, tau
) -> dict:
    """One serializable CSV row for a solve outcome."""
    return {
        "seed": seed,
        "N": n_elements,
        "K": k_users,
        "alpha_s": order,
        "tau": tau,
        "p_opt": repr(result.p_opt),
        "p_n_db": repr(result.p_n_db),
        "iterations": result.iterations,
        "feasible": result.feasible,
    }
