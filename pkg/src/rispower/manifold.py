"""Oblique-manifold primitives for 2xN matrices with unit columns.

Tangent vectors are plain 2xN ndarrays whose columns are orthogonal to the
corresponding columns of the base point.  The metric is the ambient Frobenius
inner product; the retraction renormalizes columns; vector transport is
projection onto the new tangent space.  All functions are pure.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "DegenerateStepError",
    "project_tangent",
    "retract",
    "transport",
    "inner",
    "norm",
    "column_norms",
    "random_point",
    "is_tangent",
]


class DegenerateStepError(RuntimeError):
    """A retraction step collapsed a column to zero norm (caller halves t)."""


def column_norms(mat: np.ndarray) -> np.ndarray:
    return np.sqrt((mat * mat).sum(axis=0))


def project_tangent(theta: np.ndarray, ambient: np.ndarray) -> np.ndarray:
    """Remove the columnwise radial component of an ambient vector."""
    radial = (theta * ambient).sum(axis=0)
    return ambient - theta * radial[None, :]


def retract(theta: np.ndarray, xi: np.ndarray, t: float = 1.0) -> np.ndarray:
    """Move along ``xi`` by step ``t`` and renormalize columns."""
    cand = theta + t * xi
    norms = column_norms(cand)
    if norms.min() < 1e-300:
        raise DegenerateStepError("retraction step produced a zero-norm column")
    return cand / norms[None, :]


def transport(theta_new: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Projection-based vector transport to the tangent space at theta_new."""
    return project_tangent(theta_new, xi)


def inner(a: np.ndarray, b: np.ndarray) -> float:
    return float((a * b).sum())


def norm(a: np.ndarray) -> float:
    return float(np.sqrt((a * a).sum()))


def random_point(n_elements: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random point: unit-normalized Gaussian columns."""
    mat = rng.standard_normal((2, n_elements))
    norms = column_norms(mat)
    while norms.min() < 1e-12:  # measure zero, but keep the draw valid
        mat = rng.standard_normal((2, n_elements))
        norms = column_norms(mat)
    return mat / norms[None, :]


def is_tangent(theta: np.ndarray, xi: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.abs((theta * xi).sum(axis=0)).max() <= tol)
