"""Models for evolution and experiment configuration."""

from pathlib import Path
from typing import Literal, Self

from pydantic import Field, model_validator

from therapy_saga.models.base import Model
from therapy_saga.param_space import CANONICAL_SPACE
from therapy_saga.simulator.config import SimConfig
from therapy_saga.surrogates.gp.config import GpOptions
from therapy_saga.surrogates.mlp.config import MlpOptions

type Algorithm = Literal["ga", "saga-gp", "saga-mlp"]
type ObjectiveKind = Literal["simulator", "synthetic"]

MAX_RUN_SEED = 2**64 - 1


class EvolutionConfig(Model):
    """Settings shared by the steady-state GA and the surrogate-assisted GA."""

    population_size: int = Field(default=20, gt=0, description="P")
    tournament_size: int = Field(default=3, gt=0, description="T")
    crossover_prob: float = Field(default=0.8, ge=0, le=1)
    mutation_rate: float = Field(default=1 / len(CANONICAL_SPACE), ge=0, le=1)
    mutation_step: float = Field(default=0.1, gt=0, description="Normalized units")
    replicates: int = Field(
        default=10, gt=0, description="k, simulations per candidate"
    )
    preselection_pool: int = Field(default=1000, gt=0, description="M, rated offspring")
    evaluation_budget: int = Field(
        default=200, gt=0, description="Candidates evaluated"
    )

    @model_validator(mode="after")
    def check_tournament_size(self) -> Self:
        """Require T <= P."""
        if self.tournament_size > self.population_size:
            raise ValueError(
                f"tournament_size ({self.tournament_size}) must not exceed "
                f"population_size ({self.population_size})"
            )
        return self


class SyntheticObjectiveConfig(Model):
    """Parameters of the noisy shifted sphere-plus-Rastrigin benchmark."""

    shift: float = Field(default=0.3, ge=-1, le=1)
    rastrigin_amplitude: float = Field(default=1.0, ge=0)
    noise_fraction: float = Field(
        default=0.05, ge=0, description="Noise SD / objective range"
    )


class ExperimentConfig(Model):
    """A complete, validated description of one optimization run."""

    algorithm: Algorithm = "saga-gp"
    objective: ObjectiveKind = "simulator"
    run_seed: int = Field(default=0, ge=0, le=MAX_RUN_SEED)
    output_dir: Path | None = None
    parallel_replicates: int = Field(default=1, ge=1)
    evolution: EvolutionConfig = Field(default_factory=EvolutionConfig)
    simulator: SimConfig = Field(default_factory=SimConfig)
    synthetic: SyntheticObjectiveConfig = Field(
        default_factory=SyntheticObjectiveConfig
    )
    gp: GpOptions = Field(default_factory=GpOptions)
    mlp: MlpOptions = Field(default_factory=MlpOptions)

    @property
    def surrogate_key(self) -> str | None:
        """Surrogate plugin key of a saga algorithm, None for the plain GA."""
        if self.algorithm == "ga":
            return None
        return self.algorithm.removeprefix("saga-")

    @property
    def surrogate_options(self) -> GpOptions | MlpOptions | None:
        """Options of the configured surrogate."""
        match self.surrogate_key:
            case "gp":
                return self.gp
            case "mlp":
                return self.mlp
            case _:
                return None
