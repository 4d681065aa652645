"""FastAPI service wrapping the solver, simulator, sweep, and self checks."""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..channel import ChannelSet, generate_rayleigh
from ..checks import run_checks
from ..constellation import PskConstellation, SymbolVector, random_symbols
from ..rcg import RcgConfig
from ..simulate import SweepConfig, run_sweep, simulate_sep
from ..solver import BisectionConfig, SolveResult, bisect
from .schemas import (
    BisectionParams,
    CheckRequest,
    CheckResponse,
    HealthResponse,
    SimulateRequest,
    SimulateResponse,
    SolveRequest,
    SolveResponse,
    SweepRequest,
    SweepResponse,
)

__all__ = ["create_app"]


def _bisection_config(params: BisectionParams) -> BisectionConfig:
    return BisectionConfig(
        p_lower=params.p_lower,
        p_upper=params.p_upper,
        eps_tol=params.eps_tol,
        i_max=params.max_iterations,
        warm_start=params.warm_start,
        repair_doublings=params.repair_doublings,
        rcg=RcgConfig(max_iters=500, grad_tol=1e-8),
        rcg_init=RcgConfig(max_iters=200, grad_tol=1e-8),
    )


def _materialize(req: SolveRequest):
    """Resolve a request into concrete channels, symbols, and targets."""
    c = PskConstellation(req.order, req.offset)
    rng = np.random.default_rng(np.random.SeedSequence(req.seed))
    if req.channels is not None:
        h_g = np.array([complex(re, im) for re, im in req.channels.h_g])
        h_u = np.array([[complex(re, im) for re, im in row] for row in req.channels.h_u])
        channels = ChannelSet.from_links(h_g, h_u, req.channels.noise_var)
    else:
        k = req.k_users if req.k_users is not None else len(req.symbols or [])
        channels = generate_rayleigh(req.n_elements, k, rng, req.noise_var)
    if req.symbols is not None:
        symbols = SymbolVector(np.asarray(req.symbols), req.order)
    else:
        symbols = random_symbols(channels.k_users, rng, c)
    if len(symbols) != channels.k_users:
        raise ValueError("symbol count must match the number of users")
    if req.targets is not None:
        targets = np.asarray(req.targets, dtype=np.float64)
        if targets.size != channels.k_users:
            raise ValueError("need one target per user")
    else:
        targets = np.full(channels.k_users, 10.0 ** (-req.tau))
    return c, rng, channels, symbols, targets


def _opt_float(x: float) -> float | None:
    return None if (x is None or math.isnan(x)) else float(x)


def _solve_response(req: SolveRequest, result: SolveResult, channels, symbols) -> SolveResponse:
    return SolveResponse(
        feasible=result.feasible,
        p_opt=_opt_float(result.p_opt),
        p_n_db=_opt_float(result.p_n_db),
        iterations=result.iterations,
        oracle_calls=result.oracle_calls,
        theta=[(float(v.real), float(v.imag)) for v in result.theta_opt],
        symbols=[int(v) for v in symbols.entries],
        n_elements=channels.n_elements,
        k_users=channels.k_users,
        order=req.order,
        trace=[
            {"power": s.power, "f_value": s.f_value, "branch": s.branch} for s in result.trace
        ],
        diagnostic=result.diagnostic,
        config=req.model_dump(mode="json"),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="rispower", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/solve", response_model=SolveResponse)
    def solve(req: SolveRequest) -> SolveResponse:
        try:
            c, rng, channels, symbols, targets = _materialize(req)
            result = bisect(channels, symbols, c, targets, _bisection_config(req.bisection), rng)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return _solve_response(req, result, channels, symbols)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest) -> SimulateResponse:
        try:
            c, rng, channels, symbols, targets = _materialize(req)
            result = bisect(channels, symbols, c, targets, _bisection_config(req.bisection), rng)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        if not result.feasible:
            raise HTTPException(status_code=409, detail="instance infeasible; nothing to simulate")
        est = simulate_sep(result.theta_opt, result.p_opt, channels, symbols, c, req.trials, rng)
        within = est.rates <= targets + 3.0 * est.stderr
        return SimulateResponse(
            solve=_solve_response(req, result, channels, symbols),
            trials=req.trials,
            per_user_sep=[float(r) for r in est.rates],
            stderr=[float(s) for s in est.stderr],
            targets=[float(t) for t in targets],
            within_bound=[bool(w) for w in within],
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(req: SweepRequest) -> SweepResponse:
        try:
            cfg = SweepConfig(
                n_list=tuple(req.n_list),
                tau_list=tuple(req.tau_list),
                k_users=req.k_users,
                order=req.order,
                offset=req.offset,
                symbol_count=req.symbol_count,
                seed=req.seed,
                noise_var=req.noise_var,
                channel_policy=req.channel_policy,
                db_average=req.db_average,
                threads=req.threads,
                bisection=_bisection_config(req.bisection),
            )
            records = run_sweep(cfg)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return SweepResponse(
            records=[
                {
                    "n_elements": r.n_elements,
                    "k_users": r.k_users,
                    "order": r.order,
                    "tau": r.tau,
                    "avg_p_n_db": _opt_float(r.avg_p_n_db),
                    "symbol_count": r.symbol_count,
                    "seed": r.seed,
                    "infeasible_count": r.infeasible_count,
                }
                for r in records
            ],
            config=req.model_dump(mode="json"),
        )

    @app.post("/check", response_model=CheckResponse)
    def check(req: CheckRequest) -> CheckResponse:
        outcomes = run_checks(seed=req.seed, grad_rel_tol=req.grad_rel_tol)
        return CheckResponse(
            all_passed=all(o.passed for o in outcomes),
            checks=[
                {"name": o.name, "passed": o.passed, "detail": o.detail, "tolerance": o.tolerance}
                for o in outcomes
            ],
            config=req.model_dump(mode="json"),
        )

    return app
