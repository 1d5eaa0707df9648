"""
Exception hierarchy shared by the simulator, the scenario loader and the CLI
"""

from typing import Iterable


class SimulationError(Exception):
    """Base class for every error raised by adaptive_lb"""


class ConfigValidationError(SimulationError):
    """A scenario or sweep description failed validation"""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class ContractViolation(SimulationError, ValueError):
    """A function was called outside its precondition"""


class UnknownPresetError(SimulationError):
    def __init__(self, name: str, catalog: Iterable[str]):
        self.name = name
        self.catalog = sorted(catalog)
        super().__init__(f"Unknown preset '{name}'. Available: {', '.join(self.catalog)}")


class SweepCellError(SimulationError):
    """A single (cell, seed) run inside a sweep failed"""

    def __init__(self, cell_id: str, seed: int, cause: BaseException):
        self.cell_id = cell_id
        self.seed = seed
        self.cause = cause
        super().__init__(f"Sweep cell {cell_id} (seed {seed}) failed: {cause}")
