"""Tumour damage, death and division; cargo and worker apoptosis."""

import logging

import numpy as np
from numpy.typing import NDArray

from therapy_saga.errors import ParameterError
from therapy_saga.simulator.config import SimConfig
from therapy_saga.simulator.state import Array, CellKind, SimState, Substrate

log = logging.getLogger(__name__)


def hazard_probability(rate: Array | float, dt: float) -> Array:
    """Probability ``1 - exp(-dt * rate)`` of an event within ``dt``."""
    probability: Array = -np.expm1(-dt * np.asarray(rate, dtype=np.float64))
    return probability


def update_damage(damage: Array, drug: Array, cfg: SimConfig, dt: float) -> Array:
    """Accumulate damage from the drug with implicit first-order repair."""
    gained = damage + dt * cfg.damage_rate * drug
    updated: Array = gained / (1.0 + dt * cfg.repair_rate)
    return updated


def division_rate(oxygen: Array, cfg: SimConfig) -> Array:
    """Division rate rising linearly with oxygen above the proliferation threshold."""
    span = cfg.proliferation_saturation - cfg.proliferation_threshold
    rate: Array = cfg.base_division_rate * np.maximum(
        0.0, (oxygen - cfg.proliferation_threshold) / span
    )
    return rate


def _tumour_step(
    state: SimState, cfg: SimConfig, dt: float, rng: np.random.Generator
) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    cells = state.cells
    tumour = cells.live(CellKind.TUMOUR)
    positions = cells.positions[tumour]
    drug = state.environment.sample(Substrate.DRUG, positions)
    oxygen = state.environment.sample(Substrate.OXYGEN, positions)

    cells.damage[tumour] = update_damage(cells.damage[tumour], drug, cfg, dt)
    hypoxic = oxygen < cfg.hypoxic_threshold
    cells.hypoxic_time[tumour] = np.where(hypoxic, cells.hypoxic_time[tumour] + dt, 0.0)

    drug_death = rng.random(tumour.size) < hazard_probability(
        cfg.drug_death_rate * cells.damage[tumour], dt
    )
    hypoxic_death = cells.hypoxic_time[tumour] > cfg.hypoxic_death_delay
    dies = drug_death | hypoxic_death
    divides = ~dies & (
        rng.random(tumour.size) < hazard_probability(division_rate(oxygen, cfg), dt)
    )
    return tumour[dies], tumour[divides]


def _divide(
    state: SimState,
    parents: NDArray[np.int64],
    cfg: SimConfig,
    rng: np.random.Generator,
) -> None:
    cells = state.cells
    if parents.size == 0:
        return
    angle = rng.uniform(0.0, 2.0 * np.pi, parents.size)
    direction = np.column_stack([np.cos(angle), np.sin(angle)])
    offset = cells.radius[parents][:, None] * direction
    limit = state.environment.half_width
    daughters = np.clip(cells.positions[parents] + offset, -limit, limit)
    damage = cells.damage[parents].copy()
    cells.add(daughters, CellKind.TUMOUR, cfg.cell_radius, damage=damage)


def step_biology(
    state: SimState, cfg: SimConfig, dt: float, rng: np.random.Generator
) -> None:
    """Advance damage, death and division of every live cell by ``dt``.

    Tumour cells accumulate drug damage and die with hazard
    ``drug_death_rate * damage``, die after staying hypoxic longer than the
    hypoxic delay, and otherwise divide at an oxygen-dependent rate; daughters
    sit one radius away and inherit the damage. Cargo and workers die at their
    apoptosis rates, releasing any partner.

    Raises:
        ParameterError: If ``dt`` is not positive.

    """
    if dt <= 0:
        raise ParameterError(f"Biology timestep must be positive, got {dt}")
    cells = state.cells
    dying, dividing = _tumour_step(state, cfg, dt, rng)

    for kind, rate in (
        (CellKind.CARGO, cfg.cargo_apoptosis_rate),
        (CellKind.WORKER, cfg.worker_apoptosis_rate),
    ):
        ids = cells.live(kind)
        apoptotic = ids[rng.random(ids.size) < hazard_probability(rate, dt)]
        dying = np.concatenate([dying, apoptotic])

    cells.kill(dying)
    _divide(state, dividing, cfg, rng)
    if dying.size or dividing.size:
        log.debug(
            "t=%.1f: %d deaths, %d divisions", state.time, dying.size, dividing.size
        )
