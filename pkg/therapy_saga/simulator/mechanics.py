"""Overdamped cell mechanics: contact forces, worker-cargo springs, motion."""

import numpy as np
from numpy.typing import NDArray
from scipy.spatial import cKDTree

from therapy_saga.errors import ParameterError
from therapy_saga.simulator.config import SimConfig, TherapyParams
from therapy_saga.simulator.state import UNATTACHED, Array, CellKind, Cells, SimState


def relative_strengths(
    cells: Cells, cfg: SimConfig, params: TherapyParams | None
) -> tuple[Array, Array]:
    """Per-cell relative (adhesion, repulsion) by cell kind.

    Workers use the evolved values; before injection ``params`` may be None.
    """
    adhesion = np.zeros(len(cells))
    repulsion = np.zeros(len(cells))
    per_kind = {
        CellKind.TUMOUR: (cfg.tumour_relative_adhesion, cfg.tumour_relative_repulsion),
        CellKind.CARGO: (cfg.cargo_relative_adhesion, cfg.cargo_relative_repulsion),
    }
    if params is not None:
        per_kind[CellKind.WORKER] = (params.worker_adhesion, params.worker_repulsion)
    for kind, (adh, rep) in per_kind.items():
        mask = cells.kind == kind
        adhesion[mask] = adh
        repulsion[mask] = rep
    return adhesion, repulsion


def contact_velocities(
    positions: Array,
    radius: Array,
    adhesion: Array,
    repulsion: Array,
    cfg: SimConfig,
) -> Array:
    """Velocities from pairwise repulsion and adhesion.

    For a pair at distance d with contact distance R = r_i + r_j, repulsion is
    ``base_rep * sqrt(rep_i * rep_j) * (1 - d / R)^2`` for d < R and adhesion
    ``base_adh * sqrt(adh_i * adh_j) * (1 - d / (A * R))^2`` for d < A * R.
    Coincident centres exert no force.
    """
    velocity = np.zeros_like(positions)
    if len(positions) < 2:
        return velocity
    reach = cfg.max_relative_adhesion_distance * 2.0 * float(radius.max())
    tree = cKDTree(positions)
    pairs: NDArray[np.intp] = tree.query_pairs(reach, output_type="ndarray")
    if pairs.size == 0:
        return velocity
    i, j = pairs[:, 0], pairs[:, 1]
    delta = positions[i] - positions[j]
    distance = np.hypot(delta[:, 0], delta[:, 1])
    contact = radius[i] + radius[j]
    adhesion_range = cfg.max_relative_adhesion_distance * contact

    push = np.where(
        distance < contact,
        cfg.base_repulsion_strength
        * np.sqrt(repulsion[i] * repulsion[j])
        * (1.0 - distance / contact) ** 2,
        0.0,
    )
    pull = np.where(
        distance < adhesion_range,
        cfg.base_adhesion_strength
        * np.sqrt(adhesion[i] * adhesion[j])
        * (1.0 - distance / adhesion_range) ** 2,
        0.0,
    )
    safe = np.where(distance > 0.0, distance, 1.0)
    force = ((push - pull) / safe)[:, None] * delta
    force[distance == 0.0] = 0.0
    np.add.at(velocity, i, force)
    np.add.at(velocity, j, -force)
    return velocity


def spring_velocities(
    cells: Cells, ids: NDArray[np.int64], cfg: SimConfig, dt: float
) -> Array:
    """Velocities of attached worker-cargo pairs pulled toward contact.

    Each partner moves along the pair axis at ``elastic_coefficient`` times
    the gap to the contact distance ``r_i + r_j``. The displacement over one
    step of ``dt`` is capped at ``max_elastic_displacement``. Rows follow
    ``ids``.
    """
    velocity = np.zeros((len(cells), 2))
    workers = ids[cells.kind[ids] == CellKind.WORKER]
    workers = workers[cells.attached_to[workers] != UNATTACHED]
    if workers.size:
        partners = cells.attached_to[workers]
        delta = cells.positions[partners] - cells.positions[workers]
        distance = np.hypot(delta[:, 0], delta[:, 1])
        contact = cells.radius[workers] + cells.radius[partners]
        max_speed = cfg.max_elastic_displacement / dt
        speed = np.clip(
            cfg.elastic_coefficient * (distance - contact), -max_speed, max_speed
        )
        safe = np.where(distance > 0.0, distance, 1.0)
        pull = (speed / safe)[:, None] * delta
        velocity[workers] += pull
        velocity[partners] -= pull
    return velocity[ids]


def step_mechanics(
    state: SimState,
    cfg: SimConfig,
    dt: float,
    params: TherapyParams | None = None,
) -> None:
    """Move every live cell by one forward-Euler step of its overdamped velocity.

    The velocity is the sum of the cell's own motility, contact forces and the
    attachment spring. Cells are clamped to the domain afterwards.

    Raises:
        ParameterError: If ``dt`` is not positive.

    """
    if dt <= 0:
        raise ParameterError(f"Mechanics timestep must be positive, got {dt}")
    cells = state.cells
    ids = cells.live()
    if ids.size == 0:
        return
    adhesion, repulsion = relative_strengths(cells, cfg, params)
    positions = cells.positions[ids]
    velocity = cells.motility_velocity[ids] + contact_velocities(
        positions, cells.radius[ids], adhesion[ids], repulsion[ids], cfg
    )
    velocity += spring_velocities(cells, ids, cfg, dt)
    limit = state.environment.half_width
    cells.positions[ids] = np.clip(positions + dt * velocity, -limit, limit)
