"""Desk-scale 2-D agent-based simulator of the biorobots therapy."""

from therapy_saga.simulator.config import SimConfig, TherapyParams
from therapy_saga.simulator.engine import SimOutcome, run_simulation
from therapy_saga.simulator.objective import SimulationObjective, objective_adapter

__all__ = [
    "SimConfig",
    "SimOutcome",
    "SimulationObjective",
    "TherapyParams",
    "objective_adapter",
    "run_simulation",
]
