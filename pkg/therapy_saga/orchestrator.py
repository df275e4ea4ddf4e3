"""Experiment orchestrator wiring objective, evaluator and algorithm together."""

import logging
from collections.abc import Iterator, Sequence
from concurrent.futures import Executor, ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass

from therapy_saga.benchmarks import NoisySphereRastrigin
from therapy_saga.evolution.algorithms import run_ga, run_saga
from therapy_saga.evolution.evaluation import CandidateEvaluator, Objective
from therapy_saga.models.config import ExperimentConfig
from therapy_saga.models.result import RunResult
from therapy_saga.param_space import Genotype
from therapy_saga.simulator.objective import objective_adapter
from therapy_saga.surrogates.loading import load_surrogate_manifest

log = logging.getLogger(__name__)


def build_objective(cfg: ExperimentConfig) -> Objective:
    """Objective selected by the configuration."""
    match cfg.objective:
        case "simulator":
            return objective_adapter(cfg.simulator)
        case "synthetic":
            return NoisySphereRastrigin.from_config(cfg.synthetic)


@contextmanager
def replicate_executor(width: int) -> Iterator[Executor | None]:
    """Process pool for replicate evaluations, or None to run them inline."""
    if width <= 1:
        yield None
        return
    with ProcessPoolExecutor(max_workers=width) as executor:
        yield executor


@dataclass(frozen=True, kw_only=True)
class ExperimentOrchestrator:
    """Runs one configured optimization experiment."""

    cfg: ExperimentConfig

    async def run(
        self, initial_genotypes: Sequence[Genotype] | None = None
    ) -> RunResult:
        """Run the configured algorithm to its evaluation budget.

        Args:
            initial_genotypes: Shared initial population; by default derived
                from the run seed alone

        Returns:
            The audit trail of the run

        """
        cfg = self.cfg
        log.info(
            "Running %s on the %s objective (seed=%d, budget=%d, k=%d)",
            cfg.algorithm,
            cfg.objective,
            cfg.run_seed,
            cfg.evolution.evaluation_budget,
            cfg.evolution.replicates,
        )
        with replicate_executor(cfg.parallel_replicates) as executor:
            evaluator = CandidateEvaluator(
                objective=build_objective(cfg),
                run_seed=cfg.run_seed,
                replicates=cfg.evolution.replicates,
                executor=executor,
            )
            if cfg.surrogate_key is None:
                return await run_ga(cfg.evolution, evaluator, initial_genotypes)

            manifest = load_surrogate_manifest(cfg.surrogate_key)
            return await run_saga(
                cfg.evolution,
                evaluator,
                manifest,
                cfg.surrogate_options,
                initial_genotypes,
            )
