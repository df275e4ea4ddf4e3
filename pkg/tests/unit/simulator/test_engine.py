"""Tests for the simulation driver."""

from collections.abc import Callable

import numpy as np
import pytest

from therapy_saga.errors import SimulationInstabilityError
from therapy_saga.simulator.config import SimConfig, TherapyParams
from therapy_saga.simulator.engine import (
    check_fields,
    count_sample,
    run_simulation,
    snapshot,
)
from therapy_saga.simulator.state import CellKind, Substrate
from therapy_saga.testing.simulation import cells_at, make_state


@pytest.mark.parametrize(
    ("substrate", "value", "field"),
    [(Substrate.C2, np.nan, "c2"), (Substrate.DRUG, -1.0, "drug")],
)
def test_check_fields_names_bad_field(
    tiny_config: Callable[..., SimConfig],
    substrate: Substrate,
    value: float,
    field: str,
) -> None:
    """Non-finite or negative values raise with the field name and step."""
    state = make_state(tiny_config())
    state.environment.fields[substrate, 3, 4] = value
    state.step = 17

    with pytest.raises(SimulationInstabilityError) as exc_info:
        check_fields(state)

    assert exc_info.value.field == field
    assert exc_info.value.step == 17


def test_check_fields_tolerates_round_off(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """Tiny negative values from round-off pass."""
    state = make_state(tiny_config())
    state.environment.fields[0, 0, 0] = -1e-12

    check_fields(state)


def test_count_sample_and_snapshot(tiny_config: Callable[..., SimConfig]) -> None:
    """Counts include only live cells; snapshots list every cell."""
    cells = cells_at(
        (CellKind.TUMOUR, 1.0, 2.0),
        (CellKind.WORKER, 3.0, 4.0),
        (CellKind.CARGO, 5.0, 6.0),
    )
    cells.kill(np.array([0]))
    state = make_state(tiny_config(), cells)
    state.time = 42.0

    sample = count_sample(state)
    rows = snapshot(state)

    assert (sample.tumour, sample.worker, sample.cargo) == (0, 1, 1)
    assert [row.kind for row in rows] == ["tumour", "worker", "cargo"]
    assert [row.alive for row in rows] == [False, True, True]
    assert (rows[2].x, rows[2].y, rows[2].time) == (5.0, 6.0, 42.0)


def test_run_simulation_is_deterministic(
    tiny_config: Callable[..., SimConfig], params: TherapyParams
) -> None:
    """The same seed reproduces the same counts."""
    cfg = tiny_config()

    first = run_simulation(cfg, params, seed=3)
    second = run_simulation(cfg, params, seed=3)

    assert first.tumour_cell_count == second.tumour_cell_count
    assert first.counts_over_time == second.counts_over_time
    assert first.seed == 3


def test_run_simulation_records_each_biology_step(
    tiny_config: Callable[..., SimConfig], params: TherapyParams
) -> None:
    """Counts start at zero time and follow every biology step."""
    outcome = run_simulation(tiny_config(), params, seed=0)

    counts = outcome.counts_over_time
    assert [c.time for c in counts] == [0.0, 6.0, 12.0, 18.0, 24.0]
    assert [c.worker for c in counts] == [0, 0, 0, 1, 1]
    assert counts[0].tumour > 0
    assert outcome.tumour_cell_count == counts[-1].tumour
    assert outcome.wall_time > 0.0
    assert outcome.snapshots == ()


def test_count_all_cells_adds_therapy_cells(
    tiny_config: Callable[..., SimConfig], params: TherapyParams
) -> None:
    """With count_all_cells the fitness counts every live cell."""
    outcome = run_simulation(tiny_config(count_all_cells=True), params, seed=0)

    last = outcome.counts_over_time[-1]
    assert outcome.tumour_cell_count == last.tumour + last.worker + last.cargo


def test_snapshots_follow_interval(
    tiny_config: Callable[..., SimConfig], params: TherapyParams
) -> None:
    """Snapshots are taken at multiples of the interval."""
    outcome = run_simulation(tiny_config(snapshot_interval=12.0), params, seed=0)

    assert sorted({row.time for row in outcome.snapshots}) == [0.0, 12.0, 24.0]


def test_debug_checks_do_not_change_the_outcome(
    tiny_config: Callable[..., SimConfig], params: TherapyParams
) -> None:
    """Per-step field checks only observe."""
    plain = run_simulation(tiny_config(), params, seed=5)
    checked = run_simulation(tiny_config(debug_checks=True), params, seed=5)

    assert plain.counts_over_time == checked.counts_over_time
