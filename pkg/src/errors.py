class MetaError(Exception):
    """Root of every error raised by the simulator."""


class ConfigError(MetaError, ValueError):
    """Invalid configuration, missing input file or bad command-line value."""


class DimensionError(MetaError, ValueError):
    """Matrix, vector or batch shape does not match what an operation needs."""


class ModelMismatchError(MetaError, ValueError):
    """Source models cannot be used together (layer dims or class count differ)."""


class TrainingDivergedError(MetaError, RuntimeError):
    """Source training produced a non-finite loss."""


class MalformedCsvError(MetaError, ValueError):
    """A report input CSV is missing columns, empty or has unparsable cells."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)


class InvariantViolation(MetaError, AssertionError):
    """A debug-mode audit found a model or step size in a state the run never produces."""
