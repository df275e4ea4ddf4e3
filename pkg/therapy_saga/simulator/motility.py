"""Worker migration, worker-cargo attachment and cargo release."""

import numpy as np
from numpy.typing import NDArray

from therapy_saga.simulator.config import SimConfig, TherapyParams
from therapy_saga.simulator.state import (
    UNATTACHED,
    Array,
    CellKind,
    Cells,
    Microenvironment,
    SimState,
    Substrate,
)


def unit_gradients(
    environment: Microenvironment, which: Substrate, positions: Array
) -> Array:
    """Normalized substrate gradient at the voxels of ``positions``.

    Zero where the gradient vanishes.
    """
    gx, gy = np.gradient(environment.fields[which], environment.dx)
    i, j = environment.voxel_of(positions)
    gradient = np.column_stack([gx[i, j], gy[i, j]])
    norm = np.hypot(gradient[:, 0], gradient[:, 1])
    unit: Array = np.divide(
        gradient, norm[:, None], out=np.zeros_like(gradient), where=norm[:, None] > 0
    )
    return unit


def biased_directions(gradient: Array, bias: Array, rng: np.random.Generator) -> Array:
    """Unit directions ``normalize(bias * g + (1 - bias) * u)``.

    u is uniform on the circle. A zero blend falls back to u.
    """
    angle = rng.uniform(0.0, 2.0 * np.pi, len(gradient))
    random_unit = np.column_stack([np.cos(angle), np.sin(angle)])
    blend = bias[:, None] * gradient + (1.0 - bias[:, None]) * random_unit
    norm = np.hypot(blend[:, 0], blend[:, 1])
    degenerate = norm == 0.0
    blend[degenerate] = random_unit[degenerate]
    norm[degenerate] = 1.0
    direction: Array = blend / norm[:, None]
    return direction


def repolarize_workers(
    state: SimState, params: TherapyParams, dt: float, rng: np.random.Generator
) -> None:
    """Advance worker clocks and draw new directions where they expired.

    Attached workers follow c1 with ``attached_bias``; free workers follow c2
    with ``unattached_bias``. Clocks restart from an exponential draw with mean
    ``persistence_time``.
    """
    cells = state.cells
    workers = cells.live(CellKind.WORKER)
    cells.time_to_repolarize[workers] -= dt
    due = workers[cells.time_to_repolarize[workers] <= 0.0]
    if due.size == 0:
        return
    attached = cells.attached_to[due] != UNATTACHED
    env = state.environment
    gradient = np.where(
        attached[:, None],
        unit_gradients(env, Substrate.C1, cells.positions[due]),
        unit_gradients(env, Substrate.C2, cells.positions[due]),
    )
    bias = np.where(attached, params.attached_bias, params.unattached_bias)
    cells.direction[due] = biased_directions(gradient, bias, rng)
    cells.time_to_repolarize[due] = rng.exponential(params.persistence_time, due.size)


def update_motility(state: SimState, cfg: SimConfig) -> None:
    """Set worker velocities.

    Free workers stop where c1 is below the shutdown threshold.
    """
    cells = state.cells
    workers = cells.live(CellKind.WORKER)
    c1 = state.environment.sample(Substrate.C1, cells.positions[workers])
    free = cells.attached_to[workers] == UNATTACHED
    moving = ~(free & (c1 < cfg.motility_shutdown_threshold))
    cells.motility_velocity[workers] = (
        cfg.worker_migration_speed * cells.direction[workers] * moving[:, None]
    )


def release_cargo(state: SimState, params: TherapyParams) -> NDArray[np.int64]:
    """Detach attached cargo in hypoxic voxels and start their drug release."""
    cells = state.cells
    cargo = cells.live(CellKind.CARGO)
    cargo = cargo[cells.attached_to[cargo] != UNATTACHED]
    oxygen = state.environment.sample(Substrate.OXYGEN, cells.positions[cargo])
    released = cargo[oxygen < params.cargo_release_o2_threshold]
    cells.detach(released)
    cells.releasing[released] = True
    return released


def attach_workers(state: SimState, cfg: SimConfig) -> int:
    """Attach free workers to receptive free cargo within reach, nearest pairs first.

    Cargo is receptive when the local c2 reaches the receptor threshold and it
    is not releasing. Equal distances are resolved by worker id, then cargo id.
    Returns the number of new attachments.
    """
    cells = state.cells
    workers = cells.live(CellKind.WORKER)
    workers = workers[cells.attached_to[workers] == UNATTACHED]
    cargo = cells.live(CellKind.CARGO)
    cargo = cargo[(cells.attached_to[cargo] == UNATTACHED) & ~cells.releasing[cargo]]
    c2 = state.environment.sample(Substrate.C2, cells.positions[cargo])
    cargo = cargo[c2 >= cfg.attachment_receptor_threshold]
    if workers.size == 0 or cargo.size == 0:
        return 0

    delta = cells.positions[workers][:, None, :] - cells.positions[cargo][None, :, :]
    distance = np.hypot(delta[..., 0], delta[..., 1])
    wi, ci = np.nonzero(distance <= cfg.max_attach_distance)
    order = np.lexsort((cargo[ci], workers[wi], distance[wi, ci]))

    made = 0
    for k in order:
        worker, partner = workers[wi[k]], cargo[ci[k]]
        free = cells.attached_to[[worker, partner]] == UNATTACHED
        if free.all():
            cells.attached_to[worker] = partner
            cells.attached_to[partner] = worker
            made += 1
    return made


def step_motility_and_adhesion(
    state: SimState,
    params: TherapyParams,
    cfg: SimConfig,
    dt: float,
    rng: np.random.Generator,
) -> None:
    """Release cargo, attach workers, then repolarize and set worker velocities."""
    release_cargo(state, params)
    attach_workers(state, cfg)
    repolarize_workers(state, params, dt, rng)
    update_motility(state, cfg)


def attachment_is_symmetric(cells: Cells) -> bool:
    """Whether every attachment is a mutual live worker-cargo pair."""
    linked = np.flatnonzero(cells.attached_to != UNATTACHED)
    partners = cells.attached_to[linked]
    return bool(
        np.all(cells.attached_to[partners] == linked)
        and np.all(cells.kind[linked] != cells.kind[partners])
        and np.all(cells.kind[linked] != CellKind.TUMOUR)
        and np.all(cells.alive[linked])
    )
