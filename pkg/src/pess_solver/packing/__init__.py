"""Packing equal unit spheres into the smallest sphere."""

from .container import AdjustResult, PenaltySchedule, adjust_container, penalized_energy
from .exceptions import (
    InfeasibleSolutionError,
    ObjectiveError,
    PackingError,
    SolutionFormatError,
)
from .factory import create_optimizer_settings
from .geometry import check_feasible, density, energy, energy_gradient
from .lbfgs import MaintenancePolicy, OptimizeReport, OptimizerSettings, minimize
from .models import EnergyReport, FeasibilityReport, Layout, Solution
from .neighbors import NeighborIndex, build, energy_with_neighbors, gradient_with_neighbors
from .pipeline import (
    SolveConfig,
    SolveResult,
    default_time_budget,
    initial_radius,
    initialize,
    solve,
)
from .sed import SedResult, SedSettings, sed

__version__ = "0.1.0"

__all__ = [
    "AdjustResult",
    "EnergyReport",
    "FeasibilityReport",
    "InfeasibleSolutionError",
    "Layout",
    "MaintenancePolicy",
    "NeighborIndex",
    "ObjectiveError",
    "OptimizeReport",
    "OptimizerSettings",
    "PackingError",
    "PenaltySchedule",
    "SedResult",
    "SedSettings",
    "Solution",
    "SolutionFormatError",
    "SolveConfig",
    "SolveResult",
    "adjust_container",
    "build",
    "check_feasible",
    "create_optimizer_settings",
    "default_time_budget",
    "density",
    "energy",
    "energy_gradient",
    "energy_with_neighbors",
    "gradient_with_neighbors",
    "initial_radius",
    "initialize",
    "minimize",
    "penalized_energy",
    "sed",
    "solve",
]
