"""Configuration for the multilayer-perceptron surrogate."""

from pydantic import Field

from therapy_saga.models.base import Model
from therapy_saga.numopt import LbfgsOptions


class MlpOptions(Model):
    """Architecture and training settings of the MLP surrogate."""

    hidden_units: int = Field(default=10, gt=0)
    restarts: int = Field(default=5, gt=0)
    init_scale: float = Field(
        default=0.7, gt=0, description="Uniform init half-width before 1/sqrt(fan-in)"
    )
    warm_start: bool = Field(
        default=False, description="Start each refit from the previous fit"
    )
    lbfgs: LbfgsOptions = Field(default_factory=LbfgsOptions)
