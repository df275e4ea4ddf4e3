"""Mutable world state of a simulation: cells and substrate fields."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from numpy.typing import NDArray

from therapy_saga.errors import ParameterError
from therapy_saga.simulator.config import SUBSTRATE_NAMES, SimConfig, SubstrateSpec

log = logging.getLogger(__name__)

type Array = NDArray[np.float64]

UNATTACHED = -1


class CellKind(IntEnum):
    """Cell types of the scenario."""

    TUMOUR = 0
    WORKER = 1
    CARGO = 2


class Substrate(IntEnum):
    """Index of each substrate in :attr:`Microenvironment.fields`."""

    OXYGEN = 0
    C1 = 1
    C2 = 2
    DRUG = 3


@dataclass(kw_only=True, eq=False)
class Cells:
    """All cells ever created, one row per cell id.

    Dead cells keep their row with ``alive`` false so ids stay stable.
    ``attached_to`` holds the partner id or :data:`UNATTACHED`.
    """

    positions: Array
    radius: Array
    kind: NDArray[np.int8]
    direction: Array
    time_to_repolarize: Array
    attached_to: NDArray[np.int64]
    damage: Array
    releasing: NDArray[np.bool_]
    alive: NDArray[np.bool_]
    hypoxic_time: Array
    motility_velocity: Array

    @classmethod
    def empty(cls) -> "Cells":
        """A population without cells."""
        return cls(
            positions=np.zeros((0, 2)),
            radius=np.zeros(0),
            kind=np.zeros(0, dtype=np.int8),
            direction=np.zeros((0, 2)),
            time_to_repolarize=np.zeros(0),
            attached_to=np.zeros(0, dtype=np.int64),
            damage=np.zeros(0),
            releasing=np.zeros(0, dtype=np.bool_),
            alive=np.zeros(0, dtype=np.bool_),
            hypoxic_time=np.zeros(0),
            motility_velocity=np.zeros((0, 2)),
        )

    def __len__(self) -> int:
        """Number of cell rows, dead ones included."""
        return int(self.radius.size)

    def add(
        self,
        positions: Array,
        kind: CellKind,
        radius: float,
        damage: Array | None = None,
    ) -> NDArray[np.int64]:
        """Append new live cells and return their ids."""
        count = len(positions)
        first = len(self)
        self.positions = np.vstack([self.positions, np.reshape(positions, (count, 2))])
        self.radius = np.concatenate([self.radius, np.full(count, radius)])
        self.kind = np.concatenate([self.kind, np.full(count, kind, dtype=np.int8)])
        self.direction = np.vstack([self.direction, np.zeros((count, 2))])
        self.time_to_repolarize = np.concatenate(
            [self.time_to_repolarize, np.zeros(count)]
        )
        self.attached_to = np.concatenate(
            [self.attached_to, np.full(count, UNATTACHED, dtype=np.int64)]
        )
        self.damage = np.concatenate(
            [self.damage, np.zeros(count) if damage is None else damage]
        )
        self.releasing = np.concatenate(
            [self.releasing, np.zeros(count, dtype=np.bool_)]
        )
        self.alive = np.concatenate([self.alive, np.ones(count, dtype=np.bool_)])
        self.hypoxic_time = np.concatenate([self.hypoxic_time, np.zeros(count)])
        self.motility_velocity = np.vstack(
            [self.motility_velocity, np.zeros((count, 2))]
        )
        return np.arange(first, first + count, dtype=np.int64)

    def live(self, kind: CellKind | None = None) -> NDArray[np.int64]:
        """Ids of the live cells, optionally of one kind."""
        mask = self.alive if kind is None else self.alive & (self.kind == kind)
        return np.flatnonzero(mask)

    def count(self, kind: CellKind | None = None) -> int:
        """Number of live cells, optionally of one kind."""
        return int(self.live(kind).size)

    def detach(self, ids: NDArray[np.int64]) -> None:
        """Break the attachments of ``ids`` on both sides."""
        partners = self.attached_to[ids]
        partners = partners[partners != UNATTACHED]
        self.attached_to[partners] = UNATTACHED
        self.attached_to[ids] = UNATTACHED

    def kill(self, ids: NDArray[np.int64]) -> None:
        """Mark cells dead and release their partners."""
        self.detach(ids)
        self.alive[ids] = False
        self.motility_velocity[ids] = 0.0


@dataclass(kw_only=True, eq=False)
class Microenvironment:
    """Substrate fields on a uniform square grid.

    ``fields[f, i, j]`` is the value of substrate ``f`` in the voxel whose
    centre is at x = -L + (i + 1/2) dx, y = -L + (j + 1/2) dx.
    """

    fields: Array
    dx: float
    half_width: float
    substrates: Sequence[SubstrateSpec]

    @property
    def grid_size(self) -> int:
        """Voxels along each axis."""
        return int(self.fields.shape[1])

    def voxel_of(self, positions: Array) -> tuple[NDArray[np.intp], NDArray[np.intp]]:
        """Voxel indices (i, j) containing each position."""
        shifted = np.reshape(positions, (-1, 2)) + self.half_width
        idx = np.floor(shifted / self.dx).astype(np.intp)
        idx = np.clip(idx, 0, self.grid_size - 1)
        return idx[:, 0], idx[:, 1]

    def sample(self, which: Substrate, positions: Array) -> Array:
        """Value of a substrate at the voxels of ``positions``."""
        i, j = self.voxel_of(positions)
        values: Array = self.fields[which, i, j]
        return values


@dataclass(kw_only=True, eq=False)
class SimState:
    """Cells, fields and the clock of one simulation."""

    cells: Cells
    environment: Microenvironment
    time: float = 0.0
    step: int = 0


def hex_lattice_in_disc(radius: float, spacing: float) -> Array:
    """Points of a hexagonal lattice through the origin lying in a disc.

    The lattice has rows ``spacing * sqrt(3) / 2`` apart, odd rows shifted by
    half a spacing.
    """
    row_height = spacing * np.sqrt(3.0) / 2.0
    n_rows = int(np.ceil(radius / row_height)) + 1
    n_cols = int(np.ceil(radius / spacing)) + 1
    rows = np.arange(-n_rows, n_rows + 1)
    cols = np.arange(-n_cols, n_cols + 1)
    jj, ii = np.meshgrid(rows, cols, indexing="ij")
    x = (ii + 0.5 * (jj % 2)) * spacing
    y = jj * row_height
    points = np.column_stack([x.ravel(), y.ravel()])
    inside = np.hypot(points[:, 0], points[:, 1]) <= radius + 1e-9
    return points[inside]


def init_state(cfg: SimConfig, rng: np.random.Generator) -> SimState:
    """Seed a hex-packed tumour disc and the initial substrate fields.

    Dirichlet substrates start at their boundary value, the others at zero.

    Raises:
        ParameterError: If the tumour does not fit in the domain.

    """
    if cfg.tumour_radius > cfg.domain_half_width:
        raise ParameterError(
            f"Tumour radius {cfg.tumour_radius} exceeds"
            f" domain half-width {cfg.domain_half_width}"
        )
    cells = Cells.empty()
    spacing = 2.0 * cfg.cell_radius * cfg.packing_factor
    lattice = hex_lattice_in_disc(cfg.tumour_radius, spacing)
    cells.add(lattice, CellKind.TUMOUR, cfg.cell_radius)

    n = cfg.grid_size
    fields = np.zeros((len(SUBSTRATE_NAMES), n, n))
    for index, substrate in enumerate(cfg.substrates):
        if substrate.boundary == "dirichlet":
            fields[index] = substrate.boundary_value

    log.debug("Seeded %d tumour cells on a %dx%d grid", len(cells), n, n)
    return SimState(
        cells=cells,
        environment=Microenvironment(
            fields=fields,
            dx=cfg.dx,
            half_width=cfg.domain_half_width,
            substrates=cfg.substrates,
        ),
    )


def measured_tumour_radius(state: SimState) -> float:
    """Largest distance of a live tumour-cell centre from the origin."""
    tumour = state.cells.live(CellKind.TUMOUR)
    if tumour.size == 0:
        return 0.0
    return float(np.max(np.hypot(*state.cells.positions[tumour].T)))


def inject_therapy(
    state: SimState,
    n: int,
    worker_fraction: float,
    rng: np.random.Generator,
    inner_gap: float = 20.0,
    outer_gap: float = 100.0,
    cell_radius: float = 8.0,
) -> None:
    """Inject n cells, ``round(n * worker_fraction)`` workers and the rest cargo.

    Positions are uniform in the annulus between the measured tumour radius
    plus ``inner_gap`` and plus ``outer_gap``, clipped to the domain. Halves
    round up.
    """
    if n < 0 or not 0.0 <= worker_fraction <= 1.0:
        raise ParameterError(
            f"Invalid injection: n={n}, worker_fraction={worker_fraction}"
        )
    if n == 0:
        return
    n_workers = int(np.floor(n * worker_fraction + 0.5))
    base = measured_tumour_radius(state)
    inner, outer = base + inner_gap, base + outer_gap
    r = np.sqrt(rng.uniform(inner**2, outer**2, n))
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    limit = state.environment.half_width
    polar = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    positions = np.clip(polar, -limit, limit)
    state.cells.add(positions[:n_workers], CellKind.WORKER, cell_radius)
    state.cells.add(positions[n_workers:], CellKind.CARGO, cell_radius)
    log.debug("Injected %d workers and %d cargo cells", n_workers, n - n_workers)
