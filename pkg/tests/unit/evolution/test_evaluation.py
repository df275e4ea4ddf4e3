"""Tests for candidate evaluation module."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from therapy_saga.errors import EvaluationError
from therapy_saga.evolution.evaluation import (
    CandidateEvaluator,
    SeedStream,
    derive_seed,
    evaluate_candidate,
    replicate_seeds,
    stream_seed,
)
from therapy_saga.param_space import Genotype


def sphere(genotype: Genotype, seed: int) -> float:
    """Deterministic objective ignoring the seed."""
    return float(np.sum(genotype**2))


def noisy(genotype: Genotype, seed: int) -> float:
    """Genotype-independent Normal(100, 5^2) noise."""
    return float(np.random.default_rng(seed).normal(100.0, 5.0))


def test_derive_seed_is_deterministic() -> None:
    """Equal inputs give equal seeds."""
    assert derive_seed(42, 3, 1) == derive_seed(42, 3, 1)


def test_derive_seed_separates_keys() -> None:
    """Different run seeds or spawn keys give different seeds."""
    seeds = {derive_seed(42, 3, 1), derive_seed(42, 1, 3), derive_seed(43, 3, 1)}

    assert len(seeds) == 3


def test_stream_seeds_differ_from_replicate_seeds() -> None:
    """Named streams never collide with replicate seeds."""
    streams = {stream_seed(7, stream) for stream in SeedStream}

    assert len(streams) == 3
    assert not streams & set(replicate_seeds(7, 0, 10))


def test_replicate_seeds_depend_only_on_position() -> None:
    """A replicate's seed does not depend on how many replicates are drawn."""
    assert replicate_seeds(5, 12, 3) == replicate_seeds(5, 12, 10)[:3]
    assert len(replicate_seeds(5, 12, 10)) == 10


async def test_deterministic_objective_mean_is_its_value() -> None:
    """Mean fitness of a deterministic objective equals its value."""
    genotype = np.array([0.5, -0.5, 0.0, 0.0, 0.0, 1.0])

    individual = await evaluate_candidate(sphere, genotype, replicate_seeds(0, 0, 10))

    assert individual.mean_fitness == pytest.approx(1.5)
    assert individual.samples.shape == (10,)


async def test_failing_replicate_raises_evaluation_error() -> None:
    """A failing replicate raises EvaluationError with its index."""
    seeds = [11, 22, 33]

    def objective(genotype: Genotype, seed: int) -> float:
        if seed == 22:
            raise RuntimeError("simulation crashed")
        return 1.0

    with pytest.raises(EvaluationError) as exc_info:
        await evaluate_candidate(objective, np.zeros(6), seeds)

    assert exc_info.value.replicate_index == 1
    assert "simulation crashed" in str(exc_info.value)


async def test_executor_matches_inline_evaluation() -> None:
    """Concurrent replicates reduce to the same samples as inline ones."""
    seeds = replicate_seeds(3, 4, 8)

    inline = await evaluate_candidate(noisy, np.zeros(6), seeds)
    with ThreadPoolExecutor(max_workers=4) as executor:
        parallel = await evaluate_candidate(noisy, np.zeros(6), seeds, executor)

    np.testing.assert_array_equal(inline.samples, parallel.samples)
    assert inline.mean_fitness == parallel.mean_fitness


async def test_executor_failure_raises_evaluation_error() -> None:
    """A replicate failing in the executor raises EvaluationError."""

    def objective(genotype: Genotype, seed: int) -> float:
        raise ValueError("bad seed")

    with (
        ThreadPoolExecutor(max_workers=2) as executor,
        pytest.raises(EvaluationError) as exc_info,
    ):
        await evaluate_candidate(objective, np.zeros(6), [1, 2], executor)

    assert exc_info.value.replicate_index == 0


async def test_static_sampling_shrinks_noise() -> None:
    """Means of ten noisy samples spread by about 5 / sqrt(10)."""
    evaluator = CandidateEvaluator(objective=noisy, run_seed=9, replicates=10)

    means = [
        (await evaluator.evaluate(np.zeros(6), index)).mean_fitness
        for index in range(1000)
    ]

    assert np.std(means, ddof=1) == pytest.approx(5 / np.sqrt(10), abs=0.15)


async def test_candidate_evaluator_uses_evaluation_index_seeds() -> None:
    """The evaluator seeds replicates from the evaluation index."""
    evaluator = CandidateEvaluator(objective=noisy, run_seed=1, replicates=3)

    individual = await evaluator.evaluate(np.zeros(6), 5)

    expected = [noisy(np.zeros(6), s) for s in replicate_seeds(1, 5, 3)]
    np.testing.assert_array_equal(individual.samples, expected)
