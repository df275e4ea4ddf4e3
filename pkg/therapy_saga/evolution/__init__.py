"""Steady-state GA and surrogate-assisted GA."""

from therapy_saga.evolution.algorithms import initial_population, run_ga, run_saga
from therapy_saga.evolution.evaluation import CandidateEvaluator, evaluate_candidate

__all__ = [
    "CandidateEvaluator",
    "evaluate_candidate",
    "initial_population",
    "run_ga",
    "run_saga",
]
