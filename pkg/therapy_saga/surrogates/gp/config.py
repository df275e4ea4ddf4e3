"""Configuration for the Gaussian-process surrogate."""

from typing import Self

from pydantic import Field, model_validator

from therapy_saga.models.base import Model
from therapy_saga.numopt import LbfgsOptions


class GpOptions(Model):
    """Hyperparameter search settings of the GP surrogate.

    Ranges are in normalized input units and standardized target units; restart
    starting points are drawn log-uniformly from them.
    """

    restarts: int = Field(default=5, gt=0)
    lengthscale_range: tuple[float, float] = (0.05, 5.0)
    signal_std_range: tuple[float, float] = (0.1, 10.0)
    noise_std_range: tuple[float, float] = (1e-4, 1.0)
    initial_jitter: float = Field(default=1e-10, gt=0)
    max_jitter: float = Field(default=1e-6, gt=0)
    warm_start: bool = Field(
        default=False, description="Start each refit from the previous fit"
    )
    lbfgs: LbfgsOptions = Field(default_factory=LbfgsOptions)

    @model_validator(mode="after")
    def check_ranges(self) -> Self:
        """Require positive, ordered ranges."""
        for name in ("lengthscale_range", "signal_std_range", "noise_std_range"):
            low, high = getattr(self, name)
            if not 0 < low <= high:
                raise ValueError(f"{name} must satisfy 0 < low <= high")
        if self.initial_jitter > self.max_jitter:
            raise ValueError("initial_jitter must not exceed max_jitter")
        return self
