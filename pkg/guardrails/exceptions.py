"""
Simulation Errors
Exception hierarchy shared by every package; each error knows its CLI exit code
"""


class SimulationError(RuntimeError):
    """Base class for all simulator failures"""

    exit_code = 1

    def __init__(self, message: str, key_path: str = None):
        self.key_path = key_path
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class ConfigurationError(SimulationError):
    """Invalid parameters: bounds, window containment, config keys"""

    exit_code = 2


class ResolutionError(ConfigurationError):
    """A requested width cannot be resolved on the frequency grid"""


class UsageError(SimulationError):
    """Objects combined that do not belong together (grid or length mismatch)"""


class ValidationError(SimulationError):
    """An input violates a structural contract (symmetry, orthonormality, unitarity)"""


class NumericalError(SimulationError):
    """Decomposition, root finding or determinant failed"""
