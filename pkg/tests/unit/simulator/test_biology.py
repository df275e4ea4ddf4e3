"""Tests for tumour damage, death and division."""

from collections.abc import Callable

import numpy as np
import pytest

from therapy_saga.errors import ParameterError
from therapy_saga.simulator.biology import (
    division_rate,
    hazard_probability,
    step_biology,
    update_damage,
)
from therapy_saga.simulator.config import SimConfig
from therapy_saga.simulator.state import UNATTACHED, CellKind, Substrate
from therapy_saga.testing.simulation import attach, cells_at, make_state


def test_hazard_probability() -> None:
    """Matches 1 - exp(-dt * rate) and vanishes for a zero rate."""
    np.testing.assert_allclose(
        hazard_probability(np.array([0.0, 0.1, 1.0]), 6.0),
        [0.0, 1.0 - np.exp(-0.6), 1.0 - np.exp(-6.0)],
    )


def test_damage_repairs_without_drug(tiny_config: Callable[..., SimConfig]) -> None:
    """With no drug, damage shrinks by the implicit repair factor."""
    cfg = tiny_config()

    damage = update_damage(np.array([2.0]), np.zeros(1), cfg, 6.0)

    assert damage[0] == pytest.approx(2.0 / (1.0 + 6.0 * cfg.repair_rate))
    assert damage[0] < 2.0


def test_damage_accumulates_from_drug(tiny_config: Callable[..., SimConfig]) -> None:
    """Drug exposure raises damage from zero."""
    cfg = tiny_config()

    damage = update_damage(np.zeros(1), np.ones(1), cfg, 6.0)

    expected = 6.0 * cfg.damage_rate / (1.0 + 6.0 * cfg.repair_rate)
    assert damage[0] == pytest.approx(expected)


def test_division_rate_ramps_with_oxygen(tiny_config: Callable[..., SimConfig]) -> None:
    """Zero below the threshold, the base rate at saturation."""
    cfg = tiny_config()

    rates = division_rate(np.array([0.0, 8.0, 23.0, 38.0]), cfg)

    np.testing.assert_allclose(
        rates, [0.0, 0.0, 0.5 * cfg.base_division_rate, cfg.base_division_rate]
    )


def test_drug_death_matches_hazard(tiny_config: Callable[..., SimConfig]) -> None:
    """The fraction of damaged cells dying lies within 3 SE of the hazard."""
    n, dt = 10_000, 6.0
    cfg = tiny_config(drug_death_rate=0.01, hypoxic_death_delay=1000.0)
    cells = cells_at()
    cells.add(np.zeros((n, 2)), CellKind.TUMOUR, 8.0, damage=np.full(n, 10.0))
    state = make_state(cfg, cells)

    step_biology(state, cfg, dt, np.random.default_rng(0))

    damage = 10.0 / (1.0 + dt * cfg.repair_rate)
    p = float(hazard_probability(cfg.drug_death_rate * damage, dt))
    died = n - cells.count(CellKind.TUMOUR)
    assert abs(died - n * p) <= 3.0 * np.sqrt(n * p * (1.0 - p))


def test_prolonged_hypoxia_kills(tiny_config: Callable[..., SimConfig]) -> None:
    """A cell hypoxic for longer than the delay dies."""
    cfg = tiny_config(hypoxic_death_delay=10.0)
    state = make_state(cfg, cells_at((CellKind.TUMOUR, 0.0, 0.0)))
    rng = np.random.default_rng(0)

    step_biology(state, cfg, 6.0, rng)
    assert state.cells.count(CellKind.TUMOUR) == 1

    step_biology(state, cfg, 6.0, rng)
    assert state.cells.count(CellKind.TUMOUR) == 0


def test_division_places_daughter_one_radius_away(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """Daughters sit one radius from the parent and inherit its damage."""
    cfg = tiny_config(base_division_rate=10.0, drug_death_rate=0.0)
    state = make_state(cfg, cells_at((CellKind.TUMOUR, 0.0, 0.0)), fill=0.0)
    state.environment.fields[Substrate.OXYGEN] = 38.0
    state.cells.damage[0] = 0.5

    step_biology(state, cfg, 6.0, np.random.default_rng(0))

    cells = state.cells
    assert cells.count(CellKind.TUMOUR) == 2
    assert np.hypot(*(cells.positions[1] - cells.positions[0])) == pytest.approx(8.0)
    assert cells.damage[1] == cells.damage[0]


def test_workers_persist_without_apoptosis(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """The worker count never changes with a zero apoptosis rate."""
    cfg = tiny_config(cargo_apoptosis_rate=0.5)
    cells = cells_at()
    cells.add(np.zeros((20, 2)), CellKind.WORKER, 8.0)
    cells.add(np.zeros((20, 2)), CellKind.CARGO, 8.0)
    state = make_state(cfg, cells, fill=38.0)
    rng = np.random.default_rng(0)

    for _ in range(50):
        step_biology(state, cfg, 6.0, rng)

    assert cells.count(CellKind.WORKER) == 20
    assert cells.count(CellKind.CARGO) == 0


def test_dead_worker_releases_cargo(tiny_config: Callable[..., SimConfig]) -> None:
    """Apoptosis of a worker leaves its cargo free."""
    cfg = tiny_config(worker_apoptosis_rate=100.0)
    cells = cells_at((CellKind.WORKER, 0.0, 0.0), (CellKind.CARGO, 14.0, 0.0))
    attach(cells, 0, 1)
    state = make_state(cfg, cells, fill=38.0)

    step_biology(state, cfg, 6.0, np.random.default_rng(0))

    assert not cells.alive[0]
    assert cells.attached_to[1] == UNATTACHED


def test_step_biology_rejects_zero_timestep(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """Raises ParameterError for a zero timestep."""
    cfg = tiny_config()
    with pytest.raises(ParameterError):
        step_biology(make_state(cfg), cfg, 0.0, np.random.default_rng(0))
