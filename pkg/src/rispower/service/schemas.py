"""Request/response models for the HTTP service.

Complex numbers travel as ``[re, im]`` pairs; powers that do not exist
(infeasible solves) travel as ``null`` rather than NaN.
"""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

Complex = tuple[float, float]


class ChannelPayload(BaseModel):
    """Inline channel realization (both hops)."""

    h_g: list[Complex]
    h_u: list[list[Complex]]
    noise_var: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _dims(self) -> "ChannelPayload":
        n = len(self.h_g)
        if n < 1 or not self.h_u:
            raise ValueError("channel payload must be non-empty")
        if any(len(row) != n for row in self.h_u):
            raise ValueError("every h_u row must have the same length as h_g")
        return self


class BisectionParams(BaseModel):
    p_lower: float = Field(default=0.0, ge=0)
    p_upper: float = Field(default=100.0, gt=0)
    eps_tol: float = Field(default=1e-7, gt=0)
    max_iterations: int = Field(default=60, ge=1)
    warm_start: bool = True
    repair_doublings: int = Field(default=4, ge=0)


class SolveRequest(BaseModel):
    """One power-minimization instance.

    Channels and symbols may be supplied inline; anything missing is drawn
    from the seed (channels first, then symbols, then the solver start
    point, in that fixed order).
    """

    seed: int = 0
    n_elements: int | None = Field(default=None, ge=1)
    k_users: int | None = Field(default=None, ge=1)
    order: int = Field(default=4, ge=2)
    offset: float | None = None
    noise_var: float = Field(default=1.0, gt=0)
    tau: float | None = None
    targets: list[float] | None = None
    symbols: list[int] | None = None
    channels: ChannelPayload | None = None
    bisection: BisectionParams = Field(default_factory=BisectionParams)

    @model_validator(mode="after")
    def _consistent(self) -> "SolveRequest":
        if (self.tau is None) == (self.targets is None):
            raise ValueError("provide exactly one of 'tau' or 'targets'")
        if self.channels is None and self.n_elements is None:
            raise ValueError("provide 'n_elements' or inline 'channels'")
        if self.channels is None and self.symbols is None and self.k_users is None:
            raise ValueError("provide 'k_users', inline 'channels', or 'symbols'")
        return self


class TraceEntry(BaseModel):
    power: float
    f_value: float
    branch: str


class SolveResponse(BaseModel):
    feasible: bool
    p_opt: float | None
    p_n_db: float | None
    iterations: int
    oracle_calls: int
    theta: list[Complex]
    symbols: list[int]
    n_elements: int
    k_users: int
    order: int
    trace: list[TraceEntry]
    diagnostic: str | None = None
    config: dict


class SimulateRequest(SolveRequest):
    trials: int = Field(default=100_000, ge=1)


class SimulateResponse(BaseModel):
    solve: SolveResponse
    trials: int
    per_user_sep: list[float]
    stderr: list[float]
    targets: list[float]
    within_bound: list[bool]


class SweepRequest(BaseModel):
    seed: int = 0
    n_list: list[int] = Field(min_length=1)
    tau_list: list[float] = Field(min_length=1)
    k_users: int = Field(default=5, ge=1)
    order: int = Field(default=4, ge=2)
    offset: float | None = None
    symbol_count: int = Field(default=200, ge=1)
    noise_var: float = Field(default=1.0, gt=0)
    channel_policy: str = "per_symbol"
    db_average: str = "linear"
    threads: int = Field(default=1, ge=1)
    bisection: BisectionParams = Field(default_factory=BisectionParams)


class SweepRecordModel(BaseModel):
    n_elements: int
    k_users: int
    order: int
    tau: float
    avg_p_n_db: float | None
    symbol_count: int
    seed: int
    infeasible_count: int


class SweepResponse(BaseModel):
    records: list[SweepRecordModel]
    config: dict


class CheckRequest(BaseModel):
    seed: int = 0
    grad_rel_tol: float = Field(default=1e-5, gt=0)


class CheckItem(BaseModel):
    name: str
    passed: bool
    detail: str
    tolerance: float


class CheckResponse(BaseModel):
    all_passed: bool
    checks: list[CheckItem]
    config: dict


class HealthResponse(BaseModel):
    status: str
    version: str
