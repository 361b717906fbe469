"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all kpwave errors."""


class InvalidInputError(ToolkitError, ValueError):
    """Rejected input: non-finite samples, broken symmetry, bad parameters."""


class DomainError(ToolkitError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class GridMismatchError(ToolkitError, ValueError):
    """Two fields or multipliers live on different grids."""


class StepFailureError(ToolkitError, RuntimeError):
    """Detected blow-up or other unrecoverable failure during time stepping."""


class ConfigError(ToolkitError, ValueError):
    """Invalid experiment configuration."""
