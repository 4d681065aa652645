"""Decision-threshold geometry for PSK under a unit-modulus phase vector.

A phase vector ``theta`` in C^N with unit-modulus entries is represented as
the real 2xN matrix ``Theta`` whose first row is Re(theta) and second row is
Im(theta); unit columns make it a point on the oblique manifold.  The two
signed distances of a noiseless received point to its sector boundaries are
linear in ``Theta`` through the direction matrices ``U_{1,k}``, ``U_{2,k}``
(stored NxK2, i.e. N rows by 2 columns, so ``tr(Theta @ U)`` contracts a 2xN
``Theta`` against an Nx2 ``U``):

    tr(Theta U_{1,k}) = Re(a_k^T theta) sin(phi) - Im(a_k^T theta) cos(phi)
    tr(Theta U_{2,k}) = Re(a_k^T theta) sin(phi) + Im(a_k^T theta) cos(phi)

and ``d_{nu,k} = sqrt(P) * tr(Theta U_{nu,k})``.  Negative distances mean the
noiseless point lies outside its decision sector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .channel import RotatedChannels

__all__ = [
    "PhasePoint",
    "MDDTPair",
    "DirectionMatrices",
    "mddt",
    "build_direction_matrices",
    "union_bound_sep",
]

UNIT_COLUMN_TOL = 1e-10


@dataclass(frozen=True)
class PhasePoint:
    """A 2xN real matrix with unit columns (a unit-modulus phase vector)."""

    mat: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.mat, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] != 2:
            raise ValueError("phase point must be a 2xN real matrix")
        norms = np.sqrt((mat * mat).sum(axis=0))
        if np.abs(norms - 1.0).max() > UNIT_COLUMN_TOL:
            raise ValueError("phase point columns must have unit norm")
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)

    @property
    def n_elements(self) -> int:
        return int(self.mat.shape[1])

    @classmethod
    def from_complex(cls, theta: np.ndarray) -> "PhasePoint":
        theta = np.asarray(theta, dtype=np.complex128)
        return cls(np.vstack([theta.real, theta.imag]))

    def to_complex(self) -> np.ndarray:
        return self.mat[0] + 1j * self.mat[1]


@dataclass(frozen=True)
class MDDTPair:
    """Signed scaled distances to the two decision-sector boundaries."""

    d1: np.ndarray | float
    d2: np.ndarray | float


@dataclass(frozen=True)
class DirectionMatrices:
    """Stacked direction matrices for all users.

    ``stack`` has shape (2K, N, 2): the first K slices are the ``U_{1,k}``
    matrices, the last K the ``U_{2,k}``.
    """

    stack: np.ndarray
    k_users: int = field(init=False)

    def __post_init__(self) -> None:
        stack = np.asarray(self.stack, dtype=np.float64)
        if stack.ndim != 3 or stack.shape[2] != 2 or stack.shape[0] % 2 != 0:
            raise ValueError("direction stack must have shape (2K, N, 2)")
        stack.flags.writeable = False
        object.__setattr__(self, "stack", stack)
        object.__setattr__(self, "k_users", stack.shape[0] // 2)

    @property
    def n_elements(self) -> int:
        return int(self.stack.shape[1])

    @property
    def u1(self) -> np.ndarray:
        return self.stack[: self.k_users]

    @property
    def u2(self) -> np.ndarray:
        return self.stack[self.k_users :]

    def traces(self, theta_mat: np.ndarray) -> np.ndarray:
        """All 2K values ``tr(Theta U_j)`` for a 2xN matrix ``Theta``."""
        return np.einsum("in,jni->j", theta_mat, self.stack)

    def weighted_transpose_sum(self, weights: np.ndarray) -> np.ndarray:
        """``sum_j weights[j] * U_j^T`` as a 2xN matrix (gradient kernel)."""
        return np.einsum("j,jni->in", weights, self.stack)


def mddt(omega, power: float, phi: float) -> MDDTPair:
    """Distances to the decision thresholds for rotated noiseless points.

    ``omega`` is ``a_k^T theta`` (symbol rotated onto the real axis); accepts
    a scalar or an ndarray.
    """
    if power < 0:
        raise ValueError("power must be nonnegative")
    omega = np.asarray(omega, dtype=np.complex128)
    root_p = np.sqrt(power)
    s, c = np.sin(phi), np.cos(phi)
    d1 = root_p * (omega.real * s - omega.imag * c)
    d2 = root_p * (omega.real * s + omega.imag * c)
    if omega.ndim == 0:
        return MDDTPair(float(d1), float(d2))
    return MDDTPair(d1, d2)


def build_direction_matrices(rot: RotatedChannels, phi: float) -> DirectionMatrices:
    """Assemble ``U_{1,k}`` and ``U_{2,k}`` from rotated channel rows."""
    ra, ia = rot.a.real, rot.a.imag
    s, c = np.sin(phi), np.cos(phi)
    u1 = np.stack([ra * s - ia * c, -ra * c - ia * s], axis=-1)  # (K, N, 2)
    u2 = np.stack([ra * s + ia * c, ra * c - ia * s], axis=-1)
    return DirectionMatrices(np.concatenate([u1, u2], axis=0))


def union_bound_sep(d: MDDTPair, sigma_w: float):
    """Union-bound symbol-error probability from boundary distances.

    Returns ``erfc(d1/sigma)/2 + erfc(d2/sigma)/2``, an upper bound on the
    per-user symbol-error probability; lies in (0, 2) for finite distances.
    """
    if sigma_w <= 0:
        raise ValueError("noise standard deviation must be positive")
    return 0.5 * erfc(np.asarray(d.d1) / sigma_w) + 0.5 * erfc(np.asarray(d.d2) / sigma_w)
