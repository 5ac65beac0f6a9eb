"""Exceptions raised by the packing solver."""

from typing import Optional


class PackingError(Exception):
    """Base class for solver errors."""


class ObjectiveError(PackingError, ArithmeticError):
    """An objective produced a non-finite value or gradient."""

    def __init__(self, message: str, iteration: Optional[int] = None):
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
        self.iteration = iteration


class InfeasibleSolutionError(PackingError, RuntimeError):
    """Container adjustment could not produce a feasible packing."""

    def __init__(self, message: str, report: object = None):
        super().__init__(message)
        self.report = report


class SolutionFormatError(PackingError, ValueError):
    """A solution, records or summary file could not be parsed."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line
