"""Static-resampling evaluation of candidates on a noisy objective."""

import asyncio
import logging
from collections.abc import Callable, Sequence
from concurrent.futures import Executor
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from therapy_saga.errors import EvaluationError
from therapy_saga.models.archive import Individual
from therapy_saga.param_space import Genotype

log = logging.getLogger(__name__)

type Objective = Callable[[Genotype, int], float]


# Reserved first spawn-key word; evaluation indices never reach it.
STREAM_NAMESPACE = 2**32 - 1


class SeedStream(IntEnum):
    """Independent random streams derived from one run seed."""

    POPULATION = 1
    EVOLUTION = 2
    SURROGATE = 3


def derive_seed(run_seed: int, *spawn_key: int) -> int:
    """A 64-bit seed determined only by the run seed and the spawn key."""
    sequence = np.random.SeedSequence(run_seed, spawn_key=spawn_key)
    return int(sequence.generate_state(1, np.uint64)[0])


def stream_seed(run_seed: int, stream: SeedStream, *spawn_key: int) -> int:
    """Seed of a named stream; disjoint from the replicate seeds."""
    return derive_seed(run_seed, STREAM_NAMESPACE, int(stream), *spawn_key)


def replicate_seeds(
    run_seed: int, evaluation_index: int, replicates: int
) -> Sequence[int]:
    """Seeds of the k replicate runs of one candidate.

    Each seed depends only on (run_seed, evaluation_index, replicate_index), so
    replicates can run in any order or in parallel.
    """
    return [derive_seed(run_seed, evaluation_index, r) for r in range(replicates)]


async def evaluate_candidate(
    objective: Objective,
    genotype: Genotype,
    seeds: Sequence[int],
    executor: Executor | None = None,
) -> Individual:
    """Evaluate a genotype once per seed; fitness is the mean of the samples.

    Without an executor the replicates run inline, in seed order. With one,
    they are dispatched concurrently and reduced in seed order regardless of
    completion order.

    Raises:
        EvaluationError: If any replicate failed; carries the replicate index.

    """
    if executor is None:
        samples: list[float] = []
        for index, seed in enumerate(seeds):
            try:
                samples.append(float(objective(genotype, seed)))
            except Exception as e:
                raise EvaluationError(index, str(e)) from e
        return Individual.from_samples(genotype, samples)

    loop = asyncio.get_running_loop()
    tasks = [
        loop.run_in_executor(executor, objective, genotype, seed) for seed in seeds
    ]
    results = await asyncio.gather(*tasks, return_exceptions=True)

    for index, result in enumerate(results):
        if isinstance(result, BaseException):
            log.error("Replicate %d failed: %s", index, result, exc_info=result)
            raise EvaluationError(index, str(result)) from result
    return Individual.from_samples(genotype, [float(r) for r in results])


@dataclass(frozen=True, kw_only=True)
class CandidateEvaluator:
    """Evaluates candidates k times with seeds derived from the run seed."""

    objective: Objective
    run_seed: int
    replicates: int
    executor: Executor | None = None

    async def evaluate(self, genotype: Genotype, evaluation_index: int) -> Individual:
        """Evaluate the candidate stored under ``evaluation_index``."""
        seeds = replicate_seeds(self.run_seed, evaluation_index, self.replicates)
        return await evaluate_candidate(self.objective, genotype, seeds, self.executor)
