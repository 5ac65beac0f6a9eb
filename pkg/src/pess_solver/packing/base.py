"""Base objective interface for the L-BFGS optimizer."""

from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np

from .neighbors import NeighborIndex


class Objective(ABC):
    """Abstract base class for objectives minimized by :func:`lbfgs.minimize`.

    An objective maps a flat variable vector to ``(value, gradient)``. The
    first ``3 * n_spheres`` components of the vector are sphere centers;
    objectives that set :attr:`uses_neighbors` accept a neighbor index built
    from those centers and may restrict pair terms to it.
    """

    @property
    @abstractmethod
    def dimension(self) -> int:
        """Length of the variable vector."""
        pass

    @abstractmethod
    def evaluate(
        self, x: np.ndarray, index: Optional[NeighborIndex] = None
    ) -> Tuple[float, np.ndarray]:
        """Evaluate the objective.

        Args:
            x: Variable vector of length :attr:`dimension`.
            index: Neighbor index for the centers in ``x``; ``None`` means
                enumerate every pair.

        Returns:
            Tuple of objective value and gradient.
        """
        pass

    @property
    def uses_neighbors(self) -> bool:
        """Whether the optimizer should maintain a neighbor index."""
        return False

    @property
    def n_spheres(self) -> int:
        return 0

    def centers(self, x: np.ndarray) -> np.ndarray:
        """Sphere-center slice of ``x`` as an ``(n, 3)`` view."""
        return x[: 3 * self.n_spheres].reshape(-1, 3)

    def project(self, x: np.ndarray) -> bool:
        """Restore bounds on ``x`` in place after a step.

        Returns:
            True if ``x`` was modified (the optimizer then drops its curvature
            history). The default has no bounds.
        """
        return False
