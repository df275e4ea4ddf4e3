"""Exception hierarchy shared across the package."""

from collections.abc import Sequence


class ParameterError(ValueError):
    """Raised when an argument violates its documented invariant."""


class DimensionError(ParameterError):
    """Raised when vector lengths do not match."""


class RangeError(ParameterError):
    """Raised when a physical value falls outside its parameter bounds."""


class NumericError(ArithmeticError):
    """Raised when a computation produces non-finite values."""

    def __init__(self, message: str, point: Sequence[float] | None = None) -> None:
        """Store the offending point, when known, alongside the message."""
        super().__init__(message)
        self.point = None if point is None else tuple(float(v) for v in point)


class SimulationInstabilityError(NumericError):
    """Raised when a substrate field turns NaN or negative during a simulation."""

    def __init__(self, field: str, step: int, message: str) -> None:
        """Record which field went unstable and at which diffusion step."""
        super().__init__(f"{message} (field={field}, step={step})")
        self.field = field
        self.step = step


class ModelFitError(RuntimeError):
    """Raised when every restart of a surrogate fit failed."""


class EvaluationError(RuntimeError):
    """Raised when the objective fails for one replicate of a candidate."""

    def __init__(self, replicate_index: int, message: str) -> None:
        """Record the failing replicate."""
        super().__init__(f"Replicate {replicate_index} failed: {message}")
        self.replicate_index = replicate_index


class ConfigurationError(ValueError):
    """Raised when an experiment configuration is invalid."""


class DataError(ValueError):
    """Raised when run artifacts are missing or malformed."""
