"""Minimum-power symbol-level precoding for RIS-based passive PSK transmitters.

Core pipeline: draw or load channels, rotate them by the data symbols, build
the direction matrices of the decision-threshold geometry, then bisect over
transmit power with a Riemannian conjugate-gradient feasibility oracle on the
oblique manifold.  Monte Carlo link simulation validates the union-bound
targets end to end.  A FastAPI service (``rispower.service``) wraps the core;
the CLI (``rispower.cli``) is a thin client of that service.
"""

from .channel import ChannelSet, RotatedChannels, generate_rayleigh, load_channels, rotate, save_channels
from .constellation import PskConstellation, SymbolVector, detect, random_symbols
from .geometry import (
    DirectionMatrices,
    MDDTPair,
    PhasePoint,
    build_direction_matrices,
    mddt,
    union_bound_sep,
)
from .objective import (
    FeasibilityProblem,
    constraint_g,
    constraints_all,
    f_max,
    f_smooth,
    f_smooth_grad,
    v_init,
    v_init_grad,
)
from .rcg import RcgConfig, RcgReport, minimize
from .simulate import SepEstimate, SweepConfig, SweepRecord, run_sweep, simulate_sep
from .solver import (
    BisectionConfig,
    BisectionStep,
    SolveResult,
    bisect,
    bisect_prepared,
    feasibility_oracle,
    initialize_point,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "PskConstellation",
    "SymbolVector",
    "detect",
    "random_symbols",
    "ChannelSet",
    "RotatedChannels",
    "generate_rayleigh",
    "rotate",
    "save_channels",
    "load_channels",
    "PhasePoint",
    "MDDTPair",
    "DirectionMatrices",
    "mddt",
    "build_direction_matrices",
    "union_bound_sep",
    "FeasibilityProblem",
    "constraint_g",
    "constraints_all",
    "f_max",
    "f_smooth",
    "f_smooth_grad",
    "v_init",
    "v_init_grad",
    "RcgConfig",
    "RcgReport",
    "minimize",
    "BisectionConfig",
    "BisectionStep",
    "SolveResult",
    "bisect",
    "bisect_prepared",
    "feasibility_oracle",
    "initialize_point",
    "SepEstimate",
    "SweepConfig",
    "SweepRecord",
    "run_sweep",
    "simulate_sep",
]
