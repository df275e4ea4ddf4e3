"""Base model configuration for all configuration structures."""

from pydantic import BaseModel, ConfigDict


class Model(BaseModel):
    """Base model with standard configuration.

    Frozen, and unknown keys are rejected so that a typo in an experiment file
    surfaces as an error naming the key instead of being silently ignored.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")
