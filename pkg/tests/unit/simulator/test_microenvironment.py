"""Tests for substrate transport."""

from collections.abc import Callable, Sequence

import numpy as np
import pytest
from numpy.typing import NDArray

from therapy_saga.errors import ParameterError
from therapy_saga.simulator.config import SimConfig, SubstrateSpec
from therapy_saga.simulator.engine import check_fields
from therapy_saga.simulator.microenvironment import (
    SourceTerms,
    apply_diffusion,
    source_terms,
    step_microenvironment,
    tridiagonal_bands,
)
from therapy_saga.simulator.state import CellKind, Substrate
from therapy_saga.testing.simulation import (
    attach,
    cells_at,
    make_state,
    uniform_substrates,
)

AREA_WEIGHT = np.pi * 8.0**2 / 20.0**2


def dense_lod_step(
    field: NDArray[np.float64], substrate: SubstrateSpec, dx: float, dt: float
) -> NDArray[np.float64]:
    """One x-then-y implicit step solved with dense matrices."""
    n = field.shape[0]
    ratio = substrate.diffusion_coefficient * dt / dx**2
    bands = tridiagonal_bands(n, ratio, substrate.boundary)
    matrix = (
        np.diag(bands[1]) + np.diag(bands[0, 1:], 1) + np.diag(bands[2, :-1], -1)
    )
    edge = np.zeros(n)
    if substrate.boundary == "dirichlet":
        edge[[0, -1]] = ratio * substrate.boundary_value
    half = np.linalg.solve(matrix, field + edge[:, None])
    full: NDArray[np.float64] = np.linalg.solve(matrix, half.T + edge[:, None]).T
    return full


def test_diffusion_matches_dense_solve(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """Both boundary kinds agree with a dense solve of the same system."""
    cfg = tiny_config()
    state = make_state(cfg)
    rng = np.random.default_rng(0)
    state.environment.fields[:] = rng.uniform(0.0, 40.0, state.environment.fields.shape)
    before = state.environment.fields.copy()

    apply_diffusion(state.environment, 0.5)

    for index, substrate in enumerate(cfg.substrates):
        expected = dense_lod_step(before[index], substrate, cfg.dx, 0.5)
        np.testing.assert_allclose(
            state.environment.fields[index], expected, rtol=0, atol=1e-8
        )


def test_no_flux_diffusion_conserves_mass(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """Without decay, sources or open boundaries the total stays fixed."""
    cfg = tiny_config(substrates=uniform_substrates(diffusion=3000.0))
    state = make_state(cfg)
    state.environment.fields[:, 2, 7] = 100.0
    total = state.environment.fields.sum(axis=(1, 2))

    for _ in range(50):
        step_microenvironment(state, cfg, 0.1)

    np.testing.assert_allclose(
        state.environment.fields.sum(axis=(1, 2)), total, rtol=1e-12
    )
    assert state.environment.fields[0, 2, 7] < 100.0


def test_decay_alone_divides_by_implicit_factor(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """With no diffusion a step scales every value by 1 / (1 + dt * rate)."""
    cfg = tiny_config(substrates=uniform_substrates(diffusion=0.0, decay=0.1))
    state = make_state(cfg)
    state.environment.fields[:] = np.random.default_rng(1).uniform(
        0.0, 10.0, state.environment.fields.shape
    )
    expected = state.environment.fields / (1.0 + 0.5 * 0.1)

    step_microenvironment(state, cfg, 0.5)

    np.testing.assert_array_equal(state.environment.fields, expected)


@pytest.mark.parametrize(
    "substrates",
    [
        uniform_substrates(boundary="neumann"),
        uniform_substrates(boundary="dirichlet", boundary_value=38.0),
    ],
    ids=["neumann", "dirichlet"],
)
def test_uniform_field_is_steady(
    tiny_config: Callable[..., SimConfig], substrates: Sequence[SubstrateSpec]
) -> None:
    """A uniform field at the boundary value does not change."""
    cfg = tiny_config(substrates=substrates)
    state = make_state(cfg, fill=38.0)

    for _ in range(20):
        step_microenvironment(state, cfg, 0.5)

    np.testing.assert_allclose(state.environment.fields, 38.0, rtol=1e-12)


def test_dirichlet_boundary_fills_empty_domain(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """Oxygen diffuses in from the boundary toward its far-field value."""
    cfg = tiny_config()
    state = make_state(cfg)

    for _ in range(200):
        step_microenvironment(state, cfg, 1.0)

    oxygen = state.environment.fields[Substrate.OXYGEN]
    assert oxygen.min() > 0.0
    assert oxygen.max() <= 38.0
    assert oxygen[5, 5] < oxygen[0, 5]


def test_source_terms_weight_rates_by_area(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """Each cell adds its rate times its area over the voxel area."""
    cfg = tiny_config()
    cells = cells_at(
        (CellKind.TUMOUR, 0.0, 0.0),
        (CellKind.CARGO, 50.0, 0.0),
        (CellKind.CARGO, -50.0, 0.0),
        (CellKind.WORKER, -45.0, 0.0),
        (CellKind.CARGO, 0.0, 50.0),
    )
    attach(cells, 3, 2)
    cells.releasing[4] = True
    state = make_state(cfg, cells)

    terms = source_terms(state, cfg)

    assert terms.uptake[Substrate.OXYGEN, 5, 5] == pytest.approx(
        cfg.tumour_o2_uptake * AREA_WEIGHT
    )
    assert terms.secretion[Substrate.C1, 5, 5] == pytest.approx(AREA_WEIGHT)
    assert terms.secretion[Substrate.C2, 7, 5] == pytest.approx(AREA_WEIGHT)
    assert terms.secretion[Substrate.C2, 2, 5] == 0.0
    assert terms.secretion[Substrate.DRUG, 5, 7] == pytest.approx(AREA_WEIGHT)
    assert terms.secretion[Substrate.C2].sum() == pytest.approx(AREA_WEIGHT)
    np.testing.assert_array_equal(terms.supply, terms.secretion)


def test_fields_stay_non_negative_under_random_stepping(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """Random cells, sources and timesteps never drive a field negative."""
    cfg = tiny_config()
    rng = np.random.default_rng(2)
    cells = cells_at()
    for kind in CellKind:
        cells.add(rng.uniform(-100.0, 100.0, (15, 2)), kind, 8.0)
    cells.releasing[rng.random(len(cells)) < 0.3] = True
    state = make_state(cfg, cells)
    state.environment.fields[:] = rng.uniform(0.0, 40.0, state.environment.fields.shape)

    terms = source_terms(state, cfg)
    for step in range(1000):
        if step % 100 == 0:
            cells.positions[:] = rng.uniform(-100.0, 100.0, cells.positions.shape)
            terms = source_terms(state, cfg)
        dt = float(rng.choice([0.01, 0.1, 1.0, 10.0]))
        step_microenvironment(state, cfg, dt, terms)
        state.step += 1

    assert state.environment.fields.min() >= 0.0
    check_fields(state)


def test_sources_saturate_toward_secretion_target(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """Secretion alone drives a voxel toward the saturation density."""
    cfg = tiny_config(substrates=uniform_substrates(diffusion=0.0))
    state = make_state(cfg)
    shape = state.environment.fields.shape
    secretion = np.zeros(shape)
    secretion[Substrate.C1] = 2.0
    terms = SourceTerms(
        secretion=secretion, supply=secretion * 1.0, uptake=np.zeros(shape)
    )

    for _ in range(100):
        step_microenvironment(state, cfg, 1.0, terms)

    np.testing.assert_allclose(state.environment.fields[Substrate.C1], 1.0, rtol=1e-9)
    np.testing.assert_array_equal(state.environment.fields[Substrate.DRUG], 0.0)


def test_step_rejects_non_positive_timestep(
    tiny_config: Callable[..., SimConfig],
) -> None:
    """Raises ParameterError for a zero timestep."""
    cfg = tiny_config()
    with pytest.raises(ParameterError):
        step_microenvironment(make_state(cfg), cfg, 0.0)
