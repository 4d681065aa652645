"""Shared builders for solver-level tests."""

from __future__ import annotations

import numpy as np
import pytest

from rispower.channel import generate_rayleigh, rotate
from rispower.constellation import PskConstellation, random_symbols
from rispower.geometry import build_direction_matrices


def random_directions(rng: np.random.Generator, n_elements: int, k_users: int, order: int = 4):
    """Direction matrices of a random QPSK instance (plus its pieces)."""
    c = PskConstellation(order)
    channels = generate_rayleigh(n_elements, k_users, rng)
    symbols = random_symbols(k_users, rng, c)
    dirs = build_direction_matrices(rotate(channels, symbols, c), c.half_angle)
    return c, channels, symbols, dirs


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
