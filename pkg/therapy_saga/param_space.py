"""Mapping between normalized genotypes and physical therapy parameters."""

from collections.abc import Sequence
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import Field, model_validator

from therapy_saga.errors import DimensionError, RangeError
from therapy_saga.models.base import Model

type Genotype = NDArray[np.float64]

# Genotypes live on [LOWER_BOUND, UPPER_BOUND]^N.
LOWER_BOUND = -1.0
UPPER_BOUND = 1.0


class ParameterSpec(Model):
    """Bounds and units of one evolvable physical parameter."""

    name: str = Field(..., description="Column name used in archives")
    lower: float = Field(..., description="Lower bound in physical units")
    upper: float = Field(..., description="Upper bound in physical units")
    units: str = Field(default="", description="Physical units")

    @model_validator(mode="after")
    def check_bounds(self) -> Self:
        """Require a non-empty interval."""
        if not self.lower < self.upper:
            raise ValueError(
                f"lower ({self.lower}) must be below upper ({self.upper})"
                f" for {self.name}"
            )
        return self


# Column order is fixed so archives stay comparable across runs.
CANONICAL_SPACE: Sequence[ParameterSpec] = (
    ParameterSpec(name="attached_worker_migration_bias", lower=0.0, upper=1.0),
    ParameterSpec(name="unattached_worker_migration_bias", lower=0.0, upper=1.0),
    ParameterSpec(name="worker_relative_adhesion", lower=0.0, upper=10.0),
    ParameterSpec(name="worker_relative_repulsion", lower=0.0, upper=10.0),
    ParameterSpec(
        name="worker_motility_persistence_time", lower=0.0, upper=10.0, units="min"
    ),
    ParameterSpec(
        name="cargo_release_o2_threshold", lower=0.0, upper=20.0, units="mmHg"
    ),
)


def bounds(
    space: Sequence[ParameterSpec],
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Return the lower and upper bound vectors of a space."""
    lower = np.array([spec.lower for spec in space], dtype=np.float64)
    upper = np.array([spec.upper for spec in space], dtype=np.float64)
    return lower, upper


def denormalize(
    genotype: ArrayLike, space: Sequence[ParameterSpec] = CANONICAL_SPACE
) -> NDArray[np.float64]:
    """Map a genotype on [-1, 1]^N to physical parameter values.

    Raises:
        DimensionError: If the genotype length differs from the space size.

    """
    g = np.asarray(genotype, dtype=np.float64)
    if g.shape != (len(space),):
        raise DimensionError(
            f"Genotype has shape {g.shape}, space has {len(space)} parameters"
        )
    lower, upper = bounds(space)
    return lower + (g + 1.0) / 2.0 * (upper - lower)


def normalize(
    physical: ArrayLike, space: Sequence[ParameterSpec] = CANONICAL_SPACE
) -> Genotype:
    """Map physical parameter values back onto [-1, 1]^N.

    Raises:
        DimensionError: If the vector length differs from the space size.
        RangeError: If any value lies outside its parameter bounds.

    """
    p = np.asarray(physical, dtype=np.float64)
    if p.shape != (len(space),):
        raise DimensionError(
            f"Parameter vector has shape {p.shape}, space has {len(space)} parameters"
        )
    lower, upper = bounds(space)
    outside = (p < lower) | (p > upper)
    if outside.any():
        names = [spec.name for spec, bad in zip(space, outside, strict=True) if bad]
        raise RangeError(f"Values out of bounds for: {', '.join(names)}")
    g: Genotype = 2.0 * (p - lower) / (upper - lower) - 1.0
    return g


def random_genotype(
    rng: np.random.Generator, size: int = len(CANONICAL_SPACE)
) -> Genotype:
    """Draw a genotype uniformly from [-1, 1]^size."""
    g: Genotype = rng.uniform(LOWER_BOUND, UPPER_BOUND, size)
    return g
