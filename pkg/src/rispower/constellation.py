"""PSK constellations, angular decision regions, and hard detection.

Decision regions are infinite circle sectors of width ``2 * half_angle``
centered on each symbol phase.  Points on a sector boundary are resolved
deterministically to the smaller symbol index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["PskConstellation", "SymbolVector", "detect", "random_symbols"]


def _default_offset(order: int) -> float:
    # Symmetric placement for even orders (e.g. QPSK at +-pi/4, +-3pi/4).
    return np.pi / order if order % 2 == 0 else 0.0


@dataclass(frozen=True)
class PskConstellation:
    """Uniform PSK symbol set on the unit circle.

    Parameters
    ----------
    order : int
        Modulation order, at least 2.
    offset : float, optional
        Rotation of the whole constellation in radians.  Defaults to
        ``pi / order`` for even orders and 0 otherwise.
    """

    order: int
    offset: float = None  # type: ignore[assignment]
    half_angle: float = field(init=False)
    symbols: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ValueError(f"PSK order must be >= 2, got {self.order}")
        if self.offset is None:
            object.__setattr__(self, "offset", _default_offset(self.order))
        phases = 2.0 * np.pi * np.arange(self.order) / self.order + self.offset
        symbols = np.exp(1j * phases)
        symbols.flags.writeable = False
        object.__setattr__(self, "half_angle", np.pi / self.order)
        object.__setattr__(self, "symbols", symbols)

    def symbol_values(self, indices: np.ndarray) -> np.ndarray:
        """Map symbol indices to complex constellation points."""
        return self.symbols[np.asarray(indices)]


@dataclass(frozen=True)
class SymbolVector:
    """Per-user data: indices into a PSK constellation."""

    entries: np.ndarray
    order: int

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.int64)
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)
        if entries.ndim != 1 or entries.size < 1:
            raise ValueError("symbol vector must be a non-empty 1-D index array")
        if np.any((entries < 0) | (entries >= self.order)):
            raise ValueError(f"symbol indices must lie in [0, {self.order})")

    def __len__(self) -> int:
        return int(self.entries.size)


def detect(z, c: PskConstellation):
    """Hard-detect complex samples into PSK symbol indices.

    Accepts a scalar or an ndarray of samples.  A sample whose phase is
    exactly on the boundary between two sectors resolves to the smaller
    index; ``z == 0`` is defined to detect as index 0.
    """
    z_arr = np.asarray(z)
    if not np.all(np.isfinite(z_arr)):
        raise ValueError("detect requires finite samples")
    # Sector coordinate: symbol i covers u in (i - 1/2, i + 1/2).
    u = (np.angle(z_arr) - c.offset) / (2.0 * c.half_angle)
    upper = np.floor(u + 0.5)
    tie = (u - (upper - 0.5)) == 0.0
    idx = upper.astype(np.int64) % c.order
    if np.any(tie):
        lower = (upper - 1).astype(np.int64) % c.order
        idx = np.where(tie, np.minimum(lower, idx), idx)
    idx = np.where(z_arr == 0, 0, idx)
    return int(idx) if np.isscalar(z) or z_arr.ndim == 0 else idx


def random_symbols(k_users: int, rng: np.random.Generator, c: PskConstellation) -> SymbolVector:
    """Draw K i.i.d. uniform symbol indices from a seeded generator."""
    if k_users < 1:
        raise ValueError("need at least one user")
    return SymbolVector(rng.integers(0, c.order, size=k_users), c.order)
