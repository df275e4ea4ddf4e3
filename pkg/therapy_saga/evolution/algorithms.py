"""Steady-state GA and the surrogate-assisted GA with pre-selection."""

import logging
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from typing import Any, Protocol

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel

from therapy_saga.errors import ModelFitError, ParameterError
from therapy_saga.evolution.evaluation import (
    CandidateEvaluator,
    SeedStream,
    stream_seed,
)
from therapy_saga.evolution.operators import make_offspring, tournament_select
from therapy_saga.models.archive import ArchiveRecord, Individual, best_fitness
from therapy_saga.models.config import EvolutionConfig
from therapy_saga.models.result import ModelFitRecord, RunResult, RunSeeds, TracePoint
from therapy_saga.param_space import CANONICAL_SPACE, Genotype, random_genotype
from therapy_saga.surrogates.manifest import SurrogateManifest

log = logging.getLogger(__name__)

type RatingFunction[ModelT] = Callable[
    [ModelT, NDArray[np.float64], float], NDArray[np.float64]
]


class OffspringSource(Protocol):
    """Produces the next candidate to evaluate from two selected parents."""

    def __call__(
        self,
        p1: Individual,
        p2: Individual,
        archive: Sequence[ArchiveRecord],
        rng: np.random.Generator,
    ) -> Genotype: ...


def run_seeds(run_seed: int) -> RunSeeds:
    """Derive the seeds of every random stream of a run."""
    return RunSeeds(
        run_seed=run_seed,
        population_seed=stream_seed(run_seed, SeedStream.POPULATION),
        evolution_seed=stream_seed(run_seed, SeedStream.EVOLUTION),
        surrogate_seed=stream_seed(run_seed, SeedStream.SURROGATE),
    )


def initial_population(
    run_seed: int, population_size: int, dimension: int = len(CANONICAL_SPACE)
) -> Sequence[Genotype]:
    """Initial genotypes; they depend on the run seed only, never on the algorithm."""
    rng = np.random.default_rng(run_seeds(run_seed).population_seed)
    return [random_genotype(rng, dimension) for _ in range(population_size)]


def preselect[ModelT](
    p1: Individual,
    p2: Individual,
    model: ModelT,
    best_archive_fitness: float,
    cfg: EvolutionConfig,
    rng: np.random.Generator,
    rate: RatingFunction[ModelT],
) -> Genotype:
    """Generate M offspring, rate them on the model, return the highest utility.

    Ties are broken by generation order.
    """
    offspring = np.vstack(
        [
            make_offspring(
                p1.genotype,
                p2.genotype,
                cfg.crossover_prob,
                cfg.mutation_rate,
                cfg.mutation_step,
                rng,
            )
            for _ in range(cfg.preselection_pool)
        ]
    )
    utility = rate(model, offspring, best_archive_fitness)
    chosen: Genotype = offspring[int(np.argmax(utility))].copy()
    return chosen


@dataclass(frozen=True, kw_only=True)
class VariationSource:
    """Offspring from plain crossover and mutation."""

    cfg: EvolutionConfig

    def __call__(
        self,
        p1: Individual,
        p2: Individual,
        archive: Sequence[ArchiveRecord],
        rng: np.random.Generator,
    ) -> Genotype:
        """One offspring of p1 and p2."""
        return make_offspring(
            p1.genotype,
            p2.genotype,
            self.cfg.crossover_prob,
            self.cfg.mutation_rate,
            self.cfg.mutation_step,
            rng,
        )


@dataclass(kw_only=True)
class PreselectionSource[OptionsT: BaseModel, ModelT]:
    """Offspring picked by pre-selection on a surrogate fitted to the full archive.

    Records every fit and every fit failure. A failed fit falls back to one
    unrated offspring for that iteration.
    """

    cfg: EvolutionConfig
    manifest: SurrogateManifest[OptionsT, ModelT]
    options: OptionsT
    run_seed: int
    model_fits: list[ModelFitRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    previous: ModelT | None = field(default=None, init=False)

    def __call__(
        self,
        p1: Individual,
        p2: Individual,
        archive: Sequence[ArchiveRecord],
        rng: np.random.Generator,
    ) -> Genotype:
        """Pre-select the next candidate."""
        evaluation_index = len(archive)
        seed = stream_seed(self.run_seed, SeedStream.SURROGATE, evaluation_index)
        try:
            fit_rng = np.random.default_rng(seed)
            model = self.manifest.fit(archive, self.options, fit_rng, self.previous)
        except ModelFitError as e:
            message = f"Surrogate fit failed before evaluation {evaluation_index}: {e}"
            log.warning("%s; using an unrated offspring", message)
            self.warnings.append(message)
            return VariationSource(cfg=self.cfg)(p1, p2, archive, rng)

        self.previous = model
        self.model_fits.append(
            ModelFitRecord(
                evaluation_index=evaluation_index,
                seed=seed,
                parameters=dict(self.manifest.describe(model)),
            )
        )
        return preselect(
            p1, p2, model, best_fitness(archive), self.cfg, rng, rate=self.manifest.rate
        )


async def evolve(
    cfg: EvolutionConfig,
    evaluator: CandidateEvaluator,
    source: OffspringSource,
    algorithm: str,
    initial_genotypes: Sequence[Genotype] | None = None,
) -> RunResult:
    """Steady-state loop shared by both algorithms.

    Evaluates the initial population, then repeatedly selects two parents by
    tournament, evaluates one offspring from ``source`` and replaces the loser
    of a negative tournament, until the evaluation budget is spent. Selection
    and replacement use the mean-of-k fitness only.

    Raises:
        ParameterError: If the budget is smaller than the population.

    """
    if cfg.evaluation_budget < cfg.population_size:
        raise ParameterError(
            f"Evaluation budget {cfg.evaluation_budget} is smaller than "
            f"population size {cfg.population_size}"
        )
    seeds = run_seeds(evaluator.run_seed)
    genotypes = (
        initial_population(evaluator.run_seed, cfg.population_size)
        if initial_genotypes is None
        else initial_genotypes
    )
    if len(genotypes) != cfg.population_size:
        raise ParameterError(
            f"Initial population has {len(genotypes)} members,"
            f" expected {cfg.population_size}"
        )

    start = time.perf_counter()
    archive: list[ArchiveRecord] = []
    trace: list[TracePoint] = []

    async def evaluate(genotype: Genotype) -> Individual:
        index = len(archive)
        individual = await evaluator.evaluate(genotype, index)
        archive.append(ArchiveRecord.from_individual(individual, index))
        best = min(individual.mean_fitness, trace[-1].best_fitness if trace else np.inf)
        trace.append(TracePoint(evaluation_index=index, best_fitness=best))
        log.info(
            "%s evaluation %d/%d: fitness=%.3f best=%.3f",
            algorithm,
            index + 1,
            cfg.evaluation_budget,
            individual.mean_fitness,
            best,
        )
        return individual

    population = [await evaluate(np.asarray(g, dtype=np.float64)) for g in genotypes]

    rng = np.random.default_rng(seeds.evolution_seed)
    while len(archive) < cfg.evaluation_budget:
        p1 = population[tournament_select(population, cfg.tournament_size, rng)]
        p2 = population[tournament_select(population, cfg.tournament_size, rng)]
        child = await evaluate(source(p1, p2, archive, rng))
        victim = tournament_select(population, cfg.tournament_size, rng, mode="worst")
        population[victim] = child

    return RunResult(
        algorithm=algorithm,
        archive=tuple(archive),
        best_trace=tuple(trace),
        final_population=tuple(population),
        seeds=seeds,
        wall_time=time.perf_counter() - start,
    )


async def run_ga(
    cfg: EvolutionConfig,
    evaluator: CandidateEvaluator,
    initial_genotypes: Sequence[Genotype] | None = None,
) -> RunResult:
    """Run the steady-state GA benchmark without a surrogate."""
    source = VariationSource(cfg=cfg)
    return await evolve(cfg, evaluator, source, "ga", initial_genotypes)


async def run_saga(
    cfg: EvolutionConfig,
    evaluator: CandidateEvaluator,
    manifest: SurrogateManifest[Any, Any],
    options: BaseModel | None = None,
    initial_genotypes: Sequence[Genotype] | None = None,
) -> RunResult:
    """Run the surrogate-assisted GA with pre-selection of M rated offspring."""
    source = PreselectionSource(
        cfg=cfg,
        manifest=manifest,
        options=options if options is not None else manifest.options_cls(),
        run_seed=evaluator.run_seed,
    )
    result = await evolve(
        cfg, evaluator, source, f"saga-{manifest.key}", initial_genotypes
    )
    return replace(
        result,
        model_fits=tuple(source.model_fits),
        warnings=tuple(source.warnings),
    )
