"""Tests for worker motility, attachment and cargo release."""

from collections.abc import Callable

import numpy as np
import pytest

from therapy_saga.simulator.config import SimConfig, TherapyParams
from therapy_saga.simulator.motility import (
    attach_workers,
    attachment_is_symmetric,
    biased_directions,
    release_cargo,
    repolarize_workers,
    step_motility_and_adhesion,
    unit_gradients,
    update_motility,
)
from therapy_saga.simulator.state import UNATTACHED, CellKind, Substrate
from therapy_saga.testing.simulation import attach, cells_at, make_state


def test_full_bias_follows_gradient() -> None:
    """With bias 1 the direction is the gradient itself."""
    rng = np.random.default_rng(0)
    angle = rng.uniform(0.0, 2.0 * np.pi, 50)
    gradient = np.column_stack([np.cos(angle), np.sin(angle)])

    directions = biased_directions(gradient, np.ones(50), rng)

    np.testing.assert_allclose(directions, gradient, atol=1e-12)


def test_zero_bias_is_isotropic() -> None:
    """With bias 0 directions are uniform on the circle."""
    gradient = np.tile([1.0, 0.0], (100_000, 1))

    directions = biased_directions(
        gradient, np.zeros(100_000), np.random.default_rng(1)
    )

    np.testing.assert_allclose(np.hypot(*directions.T), 1.0)
    assert np.hypot(*directions.mean(axis=0)) < 0.02


def test_partial_bias_leans_toward_gradient() -> None:
    """Intermediate bias gives unit directions with a positive mean projection."""
    gradient = np.tile([0.0, 1.0], (10_000, 1))

    directions = biased_directions(
        gradient, np.full(10_000, 0.5), np.random.default_rng(2)
    )

    np.testing.assert_allclose(np.hypot(*directions.T), 1.0)
    assert directions[:, 1].mean() > 0.5


def test_unit_gradients(tiny_config: Callable[..., SimConfig]) -> None:
    """A field rising along x gives the unit x direction; a flat one gives zero."""
    cfg = tiny_config()
    state = make_state(cfg)
    state.environment.fields[Substrate.C1] = np.arange(10.0)[:, None] * np.ones(10)
    positions = np.array([[0.0, 0.0], [-35.0, 42.0]])

    rising = unit_gradients(state.environment, Substrate.C1, positions)
    flat = unit_gradients(state.environment, Substrate.C2, positions)

    np.testing.assert_allclose(rising, [[1.0, 0.0], [1.0, 0.0]])
    np.testing.assert_array_equal(flat, 0.0)


def test_hypoxic_cargo_is_released(
    tiny_config: Callable[..., SimConfig], params: TherapyParams
) -> None:
    """Attached cargo below the release threshold detaches and starts releasing."""
    cfg = tiny_config()
    cells = cells_at((CellKind.WORKER, 0.0, 0.0), (CellKind.CARGO, 14.0, 0.0))
    attach(cells, 0, 1)
    state = make_state(cfg, cells, fill=0.0)

    released = release_cargo(state, params)

    assert list(released) == [1]
    assert list(cells.attached_to) == [UNATTACHED, UNATTACHED]
    assert cells.releasing[1]


def test_oxygenated_cargo_stays_attached(
    tiny_config: Callable[..., SimConfig], params: TherapyParams
) -> None:
    """Cargo above the release threshold keeps its worker."""
    cfg = tiny_config()
    cells = cells_at((CellKind.WORKER, 0.0, 0.0), (CellKind.CARGO, 14.0, 0.0))
    attach(cells, 0, 1)
    state = make_state(cfg, cells, fill=38.0)

    assert release_cargo(state, params).size == 0
    assert list(cells.attached_to) == [1, 0]


def test_worker_attaches_to_nearest_receptive_cargo(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """The closest cargo within reach wins."""
    cfg = tiny_config()
    cells = cells_at(
        (CellKind.WORKER, 0.0, 0.0),
        (CellKind.CARGO, 15.0, 0.0),
        (CellKind.CARGO, -10.0, 0.0),
    )
    state = make_state(cfg, cells, fill=1.0)

    assert attach_workers(state, cfg) == 1
    assert cells.attached_to[0] == 2
    assert cells.attached_to[2] == 0
    assert cells.attached_to[1] == UNATTACHED


def test_cargo_takes_one_worker(tiny_config: Callable[..., SimConfig]) -> None:
    """Two workers near one cargo make a single pair, ties broken by worker id."""
    cfg = tiny_config()
    cells = cells_at(
        (CellKind.WORKER, -10.0, 0.0),
        (CellKind.WORKER, 10.0, 0.0),
        (CellKind.CARGO, 0.0, 0.0),
    )
    state = make_state(cfg, cells, fill=1.0)

    assert attach_workers(state, cfg) == 1
    assert list(cells.attached_to) == [2, UNATTACHED, 0]
    assert attachment_is_symmetric(cells)


@pytest.mark.parametrize(
    ("c2", "distance"), [(0.0, 10.0), (1.0, 20.0)], ids=["no-signal", "out-of-reach"]
)
def test_no_attachment_without_signal_or_reach(
    tiny_config: Callable[..., SimConfig], c2: float, distance: float
) -> None:
    """Cargo needs receptor signal and a worker within the attach distance."""
    cfg = tiny_config()
    cells = cells_at((CellKind.WORKER, 0.0, 0.0), (CellKind.CARGO, distance, 0.0))
    state = make_state(cfg, cells, fill=c2)

    assert attach_workers(state, cfg) == 0


def test_releasing_cargo_is_not_receptive(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """Cargo that started releasing never re-attaches."""
    cfg = tiny_config()
    cells = cells_at((CellKind.WORKER, 0.0, 0.0), (CellKind.CARGO, 10.0, 0.0))
    cells.releasing[1] = True
    state = make_state(cfg, cells, fill=1.0)

    assert attach_workers(state, cfg) == 0


def test_free_workers_stop_without_c1(tiny_config: Callable[..., SimConfig]) -> None:
    """Motility shuts down for free workers; attached workers keep moving."""
    cfg = tiny_config()
    cells = cells_at(
        (CellKind.WORKER, -50.0, 0.0),
        (CellKind.WORKER, 50.0, 0.0),
        (CellKind.CARGO, 60.0, 0.0),
    )
    attach(cells, 1, 2)
    cells.direction[:2] = [[0.0, 1.0], [1.0, 0.0]]
    state = make_state(cfg, cells, fill=0.0)

    update_motility(state, cfg)

    np.testing.assert_array_equal(
        cells.motility_velocity, [[0.0, 0.0], [2.0, 0.0], [0.0, 0.0]]
    )


def test_repolarization_draws_unit_directions(
    tiny_config: Callable[..., SimConfig], params: TherapyParams
) -> None:
    """Due workers get a unit direction and a new non-negative clock."""
    cfg = tiny_config()
    cells = cells_at(*[(CellKind.WORKER, 0.0, 0.0)] * 20)
    cells.time_to_repolarize[10:] = 100.0
    state = make_state(cfg, cells)

    repolarize_workers(state, params, 0.5, np.random.default_rng(0))

    np.testing.assert_allclose(np.hypot(*cells.direction[:10].T), 1.0)
    np.testing.assert_array_equal(cells.direction[10:], 0.0)
    assert np.all(cells.time_to_repolarize[:10] >= 0.0)
    np.testing.assert_array_equal(cells.time_to_repolarize[10:], 99.5)


def test_attachments_stay_symmetric_over_many_steps(
    tiny_config: Callable[..., SimConfig], params: TherapyParams
) -> None:
    """Release and attachment keep every link mutual."""
    cfg = tiny_config()
    rng = np.random.default_rng(3)
    cells = cells_at()
    cells.add(rng.uniform(-40.0, 40.0, (20, 2)), CellKind.WORKER, 8.0)
    cells.add(rng.uniform(-40.0, 40.0, (40, 2)), CellKind.CARGO, 8.0)
    state = make_state(cfg, cells)
    env = state.environment.fields
    env[Substrate.C2] = 1.0
    env[Substrate.OXYGEN] = rng.uniform(0.0, 20.0, env[Substrate.OXYGEN].shape)

    linked = 0
    for _ in range(30):
        step_motility_and_adhesion(state, params, cfg, 0.5, rng)
        cells.positions += 0.5 * cells.motility_velocity
        linked += int(np.sum(cells.attached_to != UNATTACHED))
        assert attachment_is_symmetric(cells)

    assert linked > 0
