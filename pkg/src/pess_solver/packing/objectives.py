"""Elastic objectives over sphere centers, with and without a variable radius."""

import logging
from typing import Optional, Tuple

import numpy as np

from .base import Objective
from .geometry import all_pairs, container_terms, pair_terms
from .neighbors import NeighborIndex

logger = logging.getLogger(__name__)

MIN_RADIUS = 1e-6


def _pairs(n: int, index: Optional[NeighborIndex]) -> Tuple[np.ndarray, np.ndarray]:
    if index is None:
        return all_pairs(n)
    return index.first, index.second


class ElasticObjective(Objective):
    """Elastic energy ``E_R`` over the ``3n`` center coordinates at fixed radius."""

    def __init__(self, n: int, radius: float):
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        if not radius > 0:
            raise ValueError(f"radius must be positive, got {radius}")
        self._n = n
        self.radius = float(radius)

    @property
    def dimension(self) -> int:
        return 3 * self._n

    @property
    def n_spheres(self) -> int:
        return self._n

    @property
    def uses_neighbors(self) -> bool:
        return True

    def evaluate(
        self, x: np.ndarray, index: Optional[NeighborIndex] = None
    ) -> Tuple[float, np.ndarray]:
        centers = x.reshape(-1, 3)
        pair_value, _, pair_grad = pair_terms(centers, *_pairs(self._n, index))
        wall_value, _, wall_grad, _ = container_terms(centers, self.radius)
        return pair_value + wall_value, (pair_grad + wall_grad).reshape(-1)


class PenalizedObjective(Objective):
    """Penalized energy ``U = E + lambda * R^2`` over ``z = [x, R]`` (``3n + 1`` variables)."""

    def __init__(self, n: int, penalty: float):
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        if penalty < 0:
            raise ValueError(f"penalty must be non-negative, got {penalty}")
        self._n = n
        self.penalty = float(penalty)

    @property
    def dimension(self) -> int:
        return 3 * self._n + 1

    @property
    def n_spheres(self) -> int:
        return self._n

    @property
    def uses_neighbors(self) -> bool:
        return True

    def evaluate(
        self, x: np.ndarray, index: Optional[NeighborIndex] = None
    ) -> Tuple[float, np.ndarray]:
        centers = self.centers(x)
        radius = float(x[-1])
        pair_value, _, pair_grad = pair_terms(centers, *_pairs(self._n, index))
        wall_value, _, wall_grad, wall_dr = container_terms(centers, radius)
        grad = np.empty(self.dimension)
        grad[:-1] = (pair_grad + wall_grad).reshape(-1)
        grad[-1] = wall_dr + 2.0 * self.penalty * radius
        return pair_value + wall_value + self.penalty * radius * radius, grad

    def project(self, x: np.ndarray) -> bool:
        if x[-1] > 0:
            return False
        logger.debug(f"Radius driven to {x[-1]:.3e}; clamping to {MIN_RADIUS:g}")
        x[-1] = MIN_RADIUS
        return True
