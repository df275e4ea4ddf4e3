"""Evaluated candidates and archive records."""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray

from therapy_saga.errors import ParameterError


@dataclass(frozen=True, kw_only=True, eq=False)
class Individual:
    """A population member with its replicate fitness samples.

    Fitness is minimized; ``mean_fitness`` is the mean of ``samples``.
    """

    genotype: NDArray[np.float64]
    samples: NDArray[np.float64]
    mean_fitness: float

    @classmethod
    def from_samples(cls, genotype: ArrayLike, samples: ArrayLike) -> Self:
        """Build an individual whose fitness is the mean of its samples."""
        values = np.asarray(samples, dtype=np.float64)
        if values.size == 0:
            raise ParameterError("An individual needs at least one fitness sample")
        return cls(
            genotype=np.array(genotype, dtype=np.float64),
            samples=values,
            mean_fitness=float(np.mean(values)),
        )


@dataclass(frozen=True, kw_only=True, eq=False)
class ArchiveRecord:
    """A real-evaluated candidate, in evaluation order."""

    genotype: NDArray[np.float64]
    samples: NDArray[np.float64]
    mean_fitness: float
    evaluation_index: int

    @classmethod
    def from_individual(cls, individual: Individual, evaluation_index: int) -> Self:
        """Archive an evaluated individual under its evaluation index."""
        return cls(
            genotype=individual.genotype,
            samples=individual.samples,
            mean_fitness=individual.mean_fitness,
            evaluation_index=evaluation_index,
        )


def training_set(
    archive: Sequence[ArchiveRecord],
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Stack the archive into (genotypes, mean fitnesses), one row per candidate."""
    if not archive:
        raise ParameterError("The archive is empty")
    X = np.vstack([record.genotype for record in archive])
    y = np.array([record.mean_fitness for record in archive], dtype=np.float64)
    return X, y


def best_fitness(archive: Sequence[ArchiveRecord]) -> float:
    """Minimum mean fitness over the archive."""
    if not archive:
        raise ParameterError("The archive is empty")
    return min(record.mean_fitness for record in archive)
