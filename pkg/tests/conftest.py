"""Shared fixtures for the pess-solver test suite."""

import numpy as np
import pytest


@pytest.fixture
def rng():
    """Deterministic random stream."""
    return np.random.default_rng(20240607)


@pytest.fixture
def tetrahedron():
    """Regular tetrahedron with edge 2 centered at the origin."""
    vertices = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return vertices / np.sqrt(2.0)


@pytest.fixture
def triangle():
    """Equilateral triangle with side 2 in the z=0 plane, centered at the origin."""
    angles = np.array([0.0, 2.0, 4.0]) * np.pi / 3.0
    rho = 2.0 / np.sqrt(3.0)
    return np.column_stack([rho * np.cos(angles), rho * np.sin(angles), np.zeros(3)])
