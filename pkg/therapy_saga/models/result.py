"""Models for optimization run results."""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from therapy_saga.models.archive import ArchiveRecord, Individual


@dataclass(frozen=True, kw_only=True)
class TracePoint:
    """Best mean fitness seen after a given evaluation."""

    evaluation_index: int
    best_fitness: float


@dataclass(frozen=True, kw_only=True)
class ModelFitRecord:
    """Audit entry of one surrogate fit.

    Contains only what is needed to reproduce the fit - the caller knows the
    surrogate kind.
    """

    evaluation_index: int
    seed: int
    parameters: Mapping[str, Any]


@dataclass(frozen=True, kw_only=True)
class RunSeeds:
    """Seeds every random stream of a run was derived from."""

    run_seed: int
    population_seed: int
    evolution_seed: int
    surrogate_seed: int


@dataclass(frozen=True, kw_only=True, eq=False)
class RunResult:
    """Audit trail of one optimization run."""

    algorithm: str
    archive: Sequence[ArchiveRecord]
    best_trace: Sequence[TracePoint]
    final_population: Sequence[Individual]
    seeds: RunSeeds
    wall_time: float
    model_fits: Sequence[ModelFitRecord] = field(default_factory=tuple)
    warnings: Sequence[str] = field(default_factory=tuple)

    @property
    def best_record(self) -> ArchiveRecord:
        """Archive record with the lowest mean fitness (earliest on ties)."""
        return min(self.archive, key=lambda r: (r.mean_fitness, r.evaluation_index))
