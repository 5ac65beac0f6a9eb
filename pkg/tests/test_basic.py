"""Basic tests for pess-solver."""

import logging

import pytest

import pess_solver
from pess_solver import __version__


def test_version():
    """Test that version is defined."""
    assert __version__ == "0.1.0"


@pytest.mark.parametrize("name", ["Layout", "Solution", "SolveConfig", "SolveResult", "solve"])
def test_top_level_exports(name):
    assert name in pess_solver.__all__
    assert hasattr(pess_solver, name)


def test_packing_exports():
    from pess_solver import packing

    for name in packing.__all__:
        assert hasattr(packing, name), name


def test_bench_exports():
    from pess_solver import bench

    for name in bench.__all__:
        assert hasattr(bench, name), name


def test_library_logger_is_silent():
    """Importing the package installs a NullHandler only."""
    handlers = logging.getLogger("pess_solver").handlers
    assert any(isinstance(h, logging.NullHandler) for h in handlers)
