"""Configuration for the desk-scale biorobots simulator.

Published model constants keep their reference defaults. Everything under the
"desk-scale" and "model" headings is a modelling choice of this simulator and
is echoed with the run configuration.
"""

from collections.abc import Sequence
from typing import Literal, Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import Field, model_validator

from therapy_saga.errors import DimensionError
from therapy_saga.models.base import Model

SUBSTRATE_NAMES = ("oxygen", "c1", "c2", "drug")


class SubstrateSpec(Model):
    """Transport properties of one diffusing substrate."""

    name: str
    diffusion_coefficient: float = Field(..., ge=0, description="microns^2/min")
    decay_rate: float = Field(..., ge=0, description="1/min")
    boundary: Literal["dirichlet", "neumann"] = "neumann"
    boundary_value: float = Field(default=0.0, ge=0)


DEFAULT_SUBSTRATES: Sequence[SubstrateSpec] = (
    SubstrateSpec(
        name="oxygen",
        diffusion_coefficient=6000.0,
        decay_rate=0.1,
        boundary="dirichlet",
        boundary_value=38.0,
    ),
    SubstrateSpec(name="c1", diffusion_coefficient=1000.0, decay_rate=0.01),
    SubstrateSpec(name="c2", diffusion_coefficient=1000.0, decay_rate=0.01),
    SubstrateSpec(name="drug", diffusion_coefficient=1000.0, decay_rate=0.01),
)


def _is_multiple(value: float, unit: float) -> bool:
    ratio = value / unit
    return abs(ratio - round(ratio)) < 1e-9 and round(ratio) >= 1


class SimConfig(Model):
    """Fixed constants of a simulation run."""

    # model constants
    max_attach_distance: float = Field(default=18.0, gt=0, description="microns")
    min_attach_distance: float = Field(default=14.0, ge=0, description="microns")
    worker_apoptosis_rate: float = Field(default=0.0, ge=0, description="1/min")
    worker_migration_speed: float = Field(default=2.0, ge=0, description="microns/min")
    worker_o2_uptake: float = Field(default=0.1, ge=0, description="1/min")
    cargo_o2_uptake: float = Field(default=0.1, ge=0, description="1/min")
    cargo_apoptosis_rate: float = Field(default=4.065e-5, ge=0, description="1/min")
    cargo_relative_adhesion: float = Field(default=0.0, ge=0)
    cargo_relative_repulsion: float = Field(default=5.0, ge=0)
    damage_rate: float = Field(default=0.03333, ge=0, description="1/min")
    repair_rate: float = Field(default=0.004167, ge=0, description="1/min")
    drug_death_rate: float = Field(default=0.004167, ge=0, description="1/min")
    max_relative_adhesion_distance: float = Field(default=1.25, ge=1)
    elastic_coefficient: float = Field(default=0.05, ge=0, description="1/min")
    max_elastic_displacement: float = Field(default=50.0, gt=0, description="microns")
    motility_shutdown_threshold: float = Field(default=0.001, ge=0)
    attachment_receptor_threshold: float = Field(default=0.1, ge=0)

    # desk-scale controls
    domain_half_width: float = Field(default=300.0, gt=0, description="microns")
    dx: float = Field(default=20.0, gt=0, description="microns")
    diffusion_dt: float = Field(default=0.01, gt=0, description="min")
    mechanics_dt: float = Field(default=0.1, gt=0, description="min")
    biology_dt: float = Field(default=6.0, gt=0, description="min")
    growth_duration: float = Field(default=720.0, ge=0, description="min")
    treatment_duration: float = Field(default=360.0, ge=0, description="min")
    tumour_radius: float = Field(default=50.0, ge=0, description="microns")
    cell_radius: float = Field(default=8.0, gt=0, description="microns")
    packing_factor: float = Field(default=0.95, gt=0, le=1)
    injected_cells: int = Field(default=100, ge=0)
    worker_fraction: float = Field(default=0.1, ge=0, le=1)
    injection_inner_gap: float = Field(default=20.0, ge=0, description="microns")
    injection_outer_gap: float = Field(default=100.0, ge=0, description="microns")

    # model choices
    substrates: Sequence[SubstrateSpec] = Field(default=DEFAULT_SUBSTRATES)
    tumour_o2_uptake: float = Field(default=10.0, ge=0, description="1/min")
    tumour_c1_secretion: float = Field(default=1.0, ge=0, description="1/min")
    cargo_c2_secretion: float = Field(default=1.0, ge=0, description="1/min")
    cargo_drug_secretion: float = Field(default=1.0, ge=0, description="1/min")
    secretion_saturation: float = Field(default=1.0, ge=0)
    tumour_relative_adhesion: float = Field(default=1.0, ge=0)
    tumour_relative_repulsion: float = Field(default=1.0, ge=0)
    base_adhesion_strength: float = Field(
        default=0.4, ge=0, description="microns/min"
    )
    base_repulsion_strength: float = Field(
        default=10.0, ge=0, description="microns/min"
    )
    hypoxic_threshold: float = Field(default=5.0, ge=0, description="mmHg")
    hypoxic_death_delay: float = Field(default=60.0, ge=0, description="min")
    proliferation_threshold: float = Field(default=8.0, ge=0, description="mmHg")
    proliferation_saturation: float = Field(default=38.0, gt=0, description="mmHg")
    base_division_rate: float = Field(default=0.00072, ge=0, description="1/min")
    count_all_cells: bool = False
    snapshot_interval: float | None = Field(default=None, gt=0, description="min")
    debug_checks: bool = False

    @model_validator(mode="after")
    def check_invariants(self) -> Self:
        """Check the cross-field invariants of the configuration."""
        if not self.min_attach_distance < self.max_attach_distance:
            raise ValueError("min_attach_distance must be below max_attach_distance")
        if not _is_multiple(2 * self.domain_half_width, self.dx):
            raise ValueError("2 * domain_half_width must be an integer multiple of dx")
        if tuple(s.name for s in self.substrates) != SUBSTRATE_NAMES:
            raise ValueError(f"substrates must be ordered as {SUBSTRATE_NAMES}")
        if not _is_multiple(self.mechanics_dt, self.diffusion_dt):
            raise ValueError("mechanics_dt must be an integer multiple of diffusion_dt")
        if not _is_multiple(self.biology_dt, self.mechanics_dt):
            raise ValueError("biology_dt must be an integer multiple of mechanics_dt")
        for name in ("growth_duration", "treatment_duration"):
            duration = getattr(self, name)
            if duration and not _is_multiple(duration, self.biology_dt):
                raise ValueError(f"{name} must be a multiple of biology_dt")
        if not self.proliferation_threshold < self.proliferation_saturation:
            raise ValueError(
                "proliferation_threshold must be below proliferation_saturation"
            )
        return self

    @property
    def grid_size(self) -> int:
        """Number of voxels along each axis."""
        return int(round(2 * self.domain_half_width / self.dx))


class TherapyParams(Model):
    """The six evolvable worker and cargo properties, in physical units."""

    attached_bias: float = Field(..., ge=0, le=1)
    unattached_bias: float = Field(..., ge=0, le=1)
    worker_adhesion: float = Field(..., ge=0, le=10)
    worker_repulsion: float = Field(..., ge=0, le=10)
    persistence_time: float = Field(..., ge=0, le=10, description="min")
    cargo_release_o2_threshold: float = Field(..., ge=0, le=20, description="mmHg")

    @classmethod
    def from_vector(cls, values: ArrayLike) -> Self:
        """Build from a physical vector in canonical parameter order."""
        v = np.asarray(values, dtype=np.float64)
        if v.shape != (6,):
            raise DimensionError(f"Expected 6 therapy parameters, got shape {v.shape}")
        return cls(
            attached_bias=v[0],
            unattached_bias=v[1],
            worker_adhesion=v[2],
            worker_repulsion=v[3],
            persistence_time=v[4],
            cargo_release_o2_threshold=v[5],
        )

    def as_vector(self) -> NDArray[np.float64]:
        """Physical vector in canonical parameter order."""
        return np.array(
            [
                self.attached_bias,
                self.unattached_bias,
                self.worker_adhesion,
                self.worker_repulsion,
                self.persistence_time,
                self.cargo_release_o2_threshold,
            ],
            dtype=np.float64,
        )
