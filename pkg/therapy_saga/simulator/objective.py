"""Fitness function of the optimizer: the simulated final tumour size."""

from dataclasses import dataclass

import numpy as np

from therapy_saga.param_space import CANONICAL_SPACE, Genotype, bounds, denormalize
from therapy_saga.simulator.config import SimConfig, TherapyParams
from therapy_saga.simulator.engine import run_simulation


def therapy_params(genotype: Genotype) -> TherapyParams:
    """Physical therapy parameters of a genotype, clipped against round-off."""
    lower, upper = bounds(CANONICAL_SPACE)
    return TherapyParams.from_vector(np.clip(denormalize(genotype), lower, upper))


@dataclass(frozen=True, kw_only=True)
class SimulationObjective:
    """Picklable objective ``(genotype, replicate_seed) -> tumour cell count``."""

    cfg: SimConfig

    def __call__(self, genotype: Genotype, seed: int) -> float:
        """Simulate the therapy encoded by ``genotype``; lower is better."""
        outcome = run_simulation(self.cfg, therapy_params(genotype), seed)
        return float(outcome.tumour_cell_count)


def objective_adapter(cfg: SimConfig) -> SimulationObjective:
    """Objective running the simulator with ``cfg``."""
    return SimulationObjective(cfg=cfg)
