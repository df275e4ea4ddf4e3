"""Selection and variation operators of the steady-state GA."""

from collections.abc import Sequence
from typing import Literal

import numpy as np

from therapy_saga.errors import DimensionError, ParameterError
from therapy_saga.models.archive import Individual
from therapy_saga.param_space import LOWER_BOUND, UPPER_BOUND, Genotype

type TournamentMode = Literal["best", "worst"]


def tournament_select(
    population: Sequence[Individual],
    tournament_size: int,
    rng: np.random.Generator,
    mode: TournamentMode = "best",
) -> int:
    """Index of the tournament winner among T distinct random members.

    Mode ``best`` returns the lowest mean fitness, mode ``worst`` the highest
    (negative tournament). Ties go to the lowest population index.

    Raises:
        ParameterError: If T is not in [1, P].

    """
    if not 1 <= tournament_size <= len(population):
        raise ParameterError(
            f"Tournament size {tournament_size} is invalid"
            f" for population of {len(population)}"
        )
    picks = rng.choice(len(population), tournament_size, replace=False)
    drawn = sorted(int(i) for i in picks)
    fitness = [population[i].mean_fitness for i in drawn]
    # Sorted draw: min/max return the first extreme, i.e. the lowest index.
    if mode == "best":
        return drawn[fitness.index(min(fitness))]
    return drawn[fitness.index(max(fitness))]


def uniform_crossover(p1: Genotype, p2: Genotype, rng: np.random.Generator) -> Genotype:
    """Child taking each allele from p1 or p2 with probability 1/2."""
    if p1.shape != p2.shape:
        raise DimensionError(f"Parent lengths differ: {p1.size} vs {p2.size}")
    take_p2 = rng.random(p1.size) < 0.5
    child: Genotype = np.where(take_p2, p2, p1)
    return child


def mutate(
    genotype: Genotype, rate: float, step: float, rng: np.random.Generator
) -> Genotype:
    """Perturb each allele with probability ``rate`` by U(-step, step), clamped."""
    mask = rng.random(genotype.size) < rate
    delta = rng.uniform(-step, step, genotype.size)
    mutated: Genotype = np.clip(
        np.where(mask, genotype + delta, genotype), LOWER_BOUND, UPPER_BOUND
    )
    return mutated


def make_offspring(
    p1: Genotype,
    p2: Genotype,
    crossover_prob: float,
    mutation_rate: float,
    mutation_step: float,
    rng: np.random.Generator,
) -> Genotype:
    """Clone p1, cross it with p2 with probability ``crossover_prob``, mutate."""
    child = p1.copy()
    if rng.random() < crossover_prob:
        child = uniform_crossover(child, p2, rng)
    return mutate(child, mutation_rate, mutation_step, rng)
