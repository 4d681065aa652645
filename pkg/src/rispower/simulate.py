"""Link-level Monte Carlo validation and the power-versus-target sweep.

``simulate_sep`` transmits one solved phase vector through its channel,
adds circularly-symmetric Gaussian noise, hard-detects, and estimates the
per-user symbol-error rate.  ``run_sweep`` reproduces the power-figure
experiment: for each RIS size it solves many random instances across a grid
of target exponents and averages the resulting powers.

Reproducibility contract: every instance draws from a child generator spawned
as ``SeedSequence(master_seed, spawn_key=(n_elements, instance_index))``, so
results are independent of scheduling and identical for a fixed master seed.
Channels and symbols are drawn per instance and shared across the target
grid (paired comparisons); the ``fixed`` channel policy reuses one channel
realization per RIS size instead.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel import ChannelSet, generate_rayleigh, rotate
from .constellation import PskConstellation, SymbolVector, detect, random_symbols
from .geometry import build_direction_matrices
from .solver import BisectionConfig, SolveResult, bisect_prepared, initialize_point

__all__ = [
    "SepEstimate",
    "SweepConfig",
    "SweepRecord",
    "simulate_sep",
    "draw_instance",
    "run_sweep",
    "SWEEP_CSV_FIELDS",
    "write_sweep_csv",
    "sweep_summary",
]


@dataclass(frozen=True)
class SepEstimate:
    """Per-user symbol-error estimate from independent noise trials."""

    errors: np.ndarray  # (K,) int counts
    trials: int
    rates: np.ndarray  # (K,) empirical error rates
    stderr: np.ndarray  # (K,) binomial standard errors


@dataclass(frozen=True)
class SweepRecord:
    """One averaged operating point of the sweep."""

    n_elements: int
    k_users: int
    order: int
    tau: float
    avg_p_n_db: float
    symbol_count: int
    seed: int
    infeasible_count: int


@dataclass(frozen=True)
class SweepConfig:
    """Experiment grid and solver settings for :func:`run_sweep`."""

    n_list: tuple[int, ...]
    tau_list: tuple[float, ...]
    k_users: int = 5
    order: int = 4
    offset: float | None = None
    symbol_count: int = 200
    seed: int = 0
    noise_var: float = 1.0
    channel_policy: str = "per_symbol"  # or "fixed"
    db_average: str = "linear"  # mean of linear powers ("db": mean of dB values)
    threads: int = 1
    bisection: BisectionConfig = field(default_factory=BisectionConfig)

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "tau_list", tuple(float(t) for t in self.tau_list))
        if self.symbol_count < 1:
            raise ValueError("symbol_count must be positive")
        if self.channel_policy not in ("per_symbol", "fixed"):
            raise ValueError("channel_policy must be 'per_symbol' or 'fixed'")
        if self.db_average not in ("linear", "db"):
            raise ValueError("db_average must be 'linear' or 'db'")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


def simulate_sep(
    theta: np.ndarray,
    power: float,
    cs: ChannelSet,
    s: SymbolVector,
    c: PskConstellation,
    trials: int,
    rng: np.random.Generator,
) -> SepEstimate:
    """Estimate per-user SEP of a phase vector at a given transmit power.

    Each trial receives ``sqrt(P) h_k^H theta + w_k`` with noise whose real
    and imaginary parts have variance ``noise_var / 2`` each.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    theta = np.asarray(theta, dtype=np.complex128)
    noiseless = np.sqrt(power) * (np.conj(cs.h_eff) @ theta)  # (K,)
    sigma_c = math.sqrt(cs.noise_var / 2.0)
    shape = (trials, cs.k_users)
    noise = sigma_c * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    detected = detect(noiseless[None, :] + noise, c)
    errors = (detected != s.entries[None, :]).sum(axis=0)
    rates = errors / trials
    stderr = np.sqrt(rates * (1.0 - rates) / trials)
    return SepEstimate(errors=errors, trials=trials, rates=rates, stderr=stderr)


def draw_instance(
    rng: np.random.Generator,
    n_elements: int,
    k_users: int,
    c: PskConstellation,
    noise_var: float,
    channels: ChannelSet | None = None,
) -> tuple[ChannelSet, SymbolVector]:
    """Draw one (channel, symbol-vector) instance in a fixed order."""
    if channels is None:
        channels = generate_rayleigh(n_elements, k_users, rng, noise_var)
    symbols = random_symbols(k_users, rng, c)
    return channels, symbols


def _fixed_channel(cfg: SweepConfig, n_elements: int) -> ChannelSet:
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(n_elements,)))
    return generate_rayleigh(n_elements, cfg.k_users, rng, cfg.noise_var)


def _solve_instance_task(args: tuple[SweepConfig, int, int]) -> list[tuple[bool, float]]:
    """Solve one instance across the whole tau grid (worker entry point)."""
    cfg, n_elements, index = args
    c = PskConstellation(cfg.order, cfg.offset)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(n_elements, index)))
    fixed = _fixed_channel(cfg, n_elements) if cfg.channel_policy == "fixed" else None
    channels, symbols = draw_instance(rng, n_elements, cfg.k_users, c, cfg.noise_var, fixed)
    dirs = build_direction_matrices(rotate(channels, symbols, c), c.half_angle)
    sigma_w = math.sqrt(cfg.noise_var)
    theta0 = initialize_point(dirs, cfg.bisection, rng)
    out: list[tuple[bool, float]] = []
    for tau in cfg.tau_list:
        targets = np.full(cfg.k_users, 10.0 ** (-tau))
        result: SolveResult = bisect_prepared(dirs, targets, sigma_w, theta0, cfg.bisection)
        out.append((result.feasible, result.p_opt))
    return out


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """Solve the full (N, tau) grid and average the required powers.

    Infeasible instances are excluded from the average and counted in the
    record.  With ``threads > 1`` instances are solved in a process pool;
    per-instance spawned seeds keep the output identical to the serial run.
    """
    tasks = [(cfg, n, j) for n in cfg.n_list for j in range(cfg.symbol_count)]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(_solve_instance_task, tasks, chunksize=8))
    else:
        rows = [_solve_instance_task(t) for t in tasks]

    records: list[SweepRecord] = []
    for i, n in enumerate(cfg.n_list):
        block = rows[i * cfg.symbol_count : (i + 1) * cfg.symbol_count]
        for t_idx, tau in enumerate(cfg.tau_list):
            powers = np.array([inst[t_idx][1] for inst in block if inst[t_idx][0]])
            infeasible = cfg.symbol_count - powers.size
            if powers.size == 0:
                avg_db = math.nan
            elif cfg.db_average == "linear":
                avg_db = 10.0 * math.log10(powers.mean() / cfg.noise_var)
            else:
                avg_db = float(np.mean(10.0 * np.log10(powers / cfg.noise_var)))
            records.append(
                SweepRecord(
                    n_elements=n,
                    k_users=cfg.k_users,
                    order=cfg.order,
                    tau=tau,
                    avg_p_n_db=avg_db,
                    symbol_count=cfg.symbol_count,
                    seed=cfg.seed,
                    infeasible_count=infeasible,
                )
            )
    return records


SWEEP_CSV_FIELDS = [
    "N",
    "K",
    "alpha_s",
    "tau",
    "avg_p_n_db",
    "symbol_count",
    "seed",
    "infeasible_count",
]


def write_sweep_csv(records: list[SweepRecord], path) -> None:
    """Write sweep records as RFC-4180 CSV with a header row."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_CSV_FIELDS)
        writer.writeheader()
        for r in records:
            writer.writerow(
                {
                    "N": r.n_elements,
                    "K": r.k_users,
                    "alpha_s": r.order,
                    "tau": repr(r.tau),
                    "avg_p_n_db": repr(r.avg_p_n_db),
                    "symbol_count": r.symbol_count,
                    "seed": r.seed,
                    "infeasible_count": r.infeasible_count,
                }
            )


def sweep_summary(cfg: SweepConfig, records: list[SweepRecord]) -> dict:
    """JSON-ready summary: config echo plus all records."""
    cfg_dict = asdict(cfg)
    cfg_dict["n_list"] = list(cfg.n_list)
    cfg_dict["tau_list"] = list(cfg.tau_list)
    return {"config": cfg_dict, "records": [asdict(r) for r in records]}


def dump_json(payload: dict, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
