"""Generator-to-RIS and RIS-to-user channels and derived effective rows.

The effective channel row of user k is ``h_k[n] = conj(h_u[k, n]) * h_g[n]``;
the rotated row is ``a_k = conj(s_k) * conj(h_k)``, which places the intended
symbol on the positive real axis of the received plane.  All containers are
treated as immutable after construction and are safe to share across workers.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .constellation import PskConstellation, SymbolVector

__all__ = [
    "ChannelSet",
    "RotatedChannels",
    "generate_rayleigh",
    "rotate",
    "save_channels",
    "load_channels",
]

_REL_TOL = 1e-12


@dataclass(frozen=True)
class ChannelSet:
    """One channel realization: generator->RIS hop, RIS->user hops, noise."""

    h_g: np.ndarray  # (N,) complex
    h_u: np.ndarray  # (K, N) complex
    h_eff: np.ndarray  # (K, N) complex, conj(h_u) * h_g
    noise_var: float

    def __post_init__(self) -> None:
        h_g = np.asarray(self.h_g, dtype=np.complex128)
        h_u = np.atleast_2d(np.asarray(self.h_u, dtype=np.complex128))
        h_eff = np.atleast_2d(np.asarray(self.h_eff, dtype=np.complex128))
        if h_g.ndim != 1:
            raise ValueError("h_g must be a 1-D complex vector")
        if h_u.shape[1] != h_g.size or h_eff.shape != h_u.shape:
            raise ValueError("channel dimensions are inconsistent")
        if self.noise_var <= 0:
            raise ValueError("noise variance must be positive")
        expected = np.conj(h_u) * h_g[None, :]
        scale = max(float(np.abs(expected).max()), 1.0)
        if np.abs(h_eff - expected).max() > _REL_TOL * scale:
            raise ValueError("h_eff rows do not match conj(h_u) * h_g")
        for arr in (h_g, h_u, h_eff):
            arr.flags.writeable = False
        object.__setattr__(self, "h_g", h_g)
        object.__setattr__(self, "h_u", h_u)
        object.__setattr__(self, "h_eff", h_eff)

    @property
    def n_elements(self) -> int:
        return int(self.h_g.size)

    @property
    def k_users(self) -> int:
        return int(self.h_u.shape[0])

    @classmethod
    def from_links(cls, h_g, h_u, noise_var: float = 1.0) -> "ChannelSet":
        """Build from the two hops, deriving the effective rows."""
        h_g = np.asarray(h_g, dtype=np.complex128)
        h_u = np.atleast_2d(np.asarray(h_u, dtype=np.complex128))
        return cls(h_g, h_u, np.conj(h_u) * h_g[None, :], noise_var)

    @classmethod
    def all_ones(cls, n_elements: int, k_users: int, noise_var: float = 1.0) -> "ChannelSet":
        """Deterministic unit channel, handy for closed-form oracles."""
        return cls.from_links(
            np.ones(n_elements, dtype=np.complex128),
            np.ones((k_users, n_elements), dtype=np.complex128),
            noise_var,
        )


@dataclass(frozen=True)
class RotatedChannels:
    """Rows ``a_k = conj(s_k) * conj(h_k)`` used to build direction matrices."""

    a: np.ndarray  # (K, N) complex

    def __post_init__(self) -> None:
        a = np.atleast_2d(np.asarray(self.a, dtype=np.complex128))
        a.flags.writeable = False
        object.__setattr__(self, "a", a)

    @property
    def k_users(self) -> int:
        return int(self.a.shape[0])

    @property
    def n_elements(self) -> int:
        return int(self.a.shape[1])


def generate_rayleigh(
    n_elements: int, k_users: int, rng: np.random.Generator, noise_var: float = 1.0
) -> ChannelSet:
    """Draw i.i.d. CN(0, 1) entries for both hops.

    Per-component (real/imag) variance is 1/2 so each complex entry has unit
    variance.  Draw order is fixed (h_g first, then h_u row-major) so a seeded
    generator reproduces the set bit for bit.
    """
    if n_elements < 1 or k_users < 1:
        raise ValueError("n_elements and k_users must be >= 1")
    h_g = (rng.standard_normal(n_elements) + 1j * rng.standard_normal(n_elements)) / np.sqrt(2.0)
    shape = (k_users, n_elements)
    h_u = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return ChannelSet.from_links(h_g, h_u, noise_var)


def rotate(cs: ChannelSet, s: SymbolVector, c: PskConstellation) -> RotatedChannels:
    """Rotate each effective row by the conjugate of the user's symbol."""
    if len(s) != cs.k_users:
        raise ValueError("symbol vector length must equal the number of users")
    sym = c.symbol_values(s.entries)
    return RotatedChannels(np.conj(sym)[:, None] * np.conj(cs.h_eff))


# Plain-text fixture format: comment lines start with '#'; the first data
# line is "N K noise_var"; then one row for h_g and K rows for h_u, each with
# N whitespace-separated "re,im" tokens.


def _format_row(row: np.ndarray) -> str:
    return " ".join(f"{float(v.real)!r},{float(v.imag)!r}" for v in row)


def _parse_row(line: str, n: int) -> np.ndarray:
    tokens = line.split()
    if len(tokens) != n:
        raise ValueError(f"expected {n} complex tokens per row, got {len(tokens)}")
    out = np.empty(n, dtype=np.complex128)
    for i, tok in enumerate(tokens):
        re_s, im_s = tok.split(",")
        out[i] = complex(float(re_s), float(im_s))
    return out


def save_channels(cs: ChannelSet, path) -> None:
    """Write a channel set in the plain-text matrix format."""
    buf = io.StringIO()
    buf.write("# rispower channel set: N K noise_var; h_g row; K h_u rows\n")
    buf.write(f"{cs.n_elements} {cs.k_users} {float(cs.noise_var)!r}\n")
    buf.write(_format_row(cs.h_g) + "\n")
    for k in range(cs.k_users):
        buf.write(_format_row(cs.h_u[k]) + "\n")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(buf.getvalue())


def load_channels(path) -> ChannelSet:
    """Read a channel set written by :func:`save_channels`."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError(f"no data in channel file {path!s}")
    header = lines[0].split()
    if len(header) != 3:
        raise ValueError("channel file header must be 'N K noise_var'")
    n, k = int(header[0]), int(header[1])
    noise_var = float(header[2])
    if len(lines) != 1 + 1 + k:
        raise ValueError(f"channel file must have {1 + k} data rows, found {len(lines) - 1}")
    h_g = _parse_row(lines[1], n)
    h_u = np.stack([_parse_row(lines[2 + i], n) for i in range(k)])
    return ChannelSet.from_links(h_g, h_u, noise_var)
