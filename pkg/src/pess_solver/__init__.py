"""pess-solver - packing equal spheres in a sphere, with a benchmark harness."""

__version__ = "0.1.0"
__author__ = "pess-solver contributors"
__license__ = "MIT"

import logging

from .packing import Layout, Solution, SolveConfig, SolveResult, solve

__all__ = [
    "__version__",
    "__author__",
    "__license__",
    "Layout",
    "Solution",
    "SolveConfig",
    "SolveResult",
    "solve",
]

logging.getLogger(__name__).addHandler(logging.NullHandler())
