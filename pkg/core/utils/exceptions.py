# core/utils/exceptions.py

from typing import Optional


class LpHomotopyError(Exception):
    """Base class for all solver errors"""


class ParameterError(LpHomotopyError, ValueError):
    """A scalar parameter is outside its admissible range"""


class DimensionError(LpHomotopyError, ValueError):
    """Shapes of the objects involved are inconsistent"""

    def __init__(self, message: str, obj: Optional[str] = None):
        super().__init__(message)
        self.obj = obj


class MatrixMarketParseError(LpHomotopyError, ValueError):
    """Malformed matrix or vector file"""

    def __init__(self, message: str, path: str = '', line: Optional[int] = None):
        location = f"{path}:{line}" if line is not None else path
        super().__init__(f"{location}: {message}" if location else message)
        self.path = path
        self.line = line


class NonConvergenceError(LpHomotopyError, RuntimeError):
    """An iterative method hit its iteration cap"""

    def __init__(self, message: str, iterations: int = 0, phase: Optional[int] = None):
        super().__init__(message)
        self.iterations = iterations
        self.phase = phase


class InnerSolverError(LpHomotopyError, RuntimeError):
    """The inner solver failed inside a homotopy phase"""

    def __init__(self, message: str, phase: int, report=None):
        super().__init__(message)
        self.phase = phase
        self.report = report


class MaxPhasesExceededError(LpHomotopyError, RuntimeError):
    """The homotopy loop ran past config.max_phases"""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class OracleError(LpHomotopyError, RuntimeError):
    """The reference solver could not certify its answer"""
