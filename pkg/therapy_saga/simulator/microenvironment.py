"""Substrate secretion, uptake, decay and diffusion on the 2-D grid.

Each step applies, per substrate:

1. cell sources and sinks, implicitly per voxel,
2. first-order decay, implicitly,
3. diffusion by locally-one-dimensional splitting: an implicit tridiagonal
   solve along x for every row, then along y for every column.

Every part is unconditionally stable and keeps the fields non-negative.
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import solve_banded

from therapy_saga.errors import ParameterError
from therapy_saga.simulator.config import SimConfig, SubstrateSpec
from therapy_saga.simulator.state import (
    Array,
    CellKind,
    Cells,
    Microenvironment,
    SimState,
    Substrate,
)


@dataclass(frozen=True, kw_only=True, eq=False)
class SourceTerms:
    """Per-voxel source and sink rates of every substrate.

    The implicit voxel update is
    ``rho <- (rho + dt * supply) / (1 + dt * (secretion + uptake))`` where
    ``supply`` is the secretion rate times the saturation density.
    """

    secretion: Array
    supply: Array
    uptake: Array

    @classmethod
    def none(cls, shape: tuple[int, ...]) -> "SourceTerms":
        """Terms of an empty world."""
        return cls(
            secretion=np.zeros(shape), supply=np.zeros(shape), uptake=np.zeros(shape)
        )


def tridiagonal_bands(size: int, ratio: float, boundary: str) -> Array:
    """Banded form of the 1-D implicit diffusion matrix ``I - r * Laplacian``.

    No-flux ends have diagonal ``1 + r``; fixed-value ends keep ``1 + 2r`` and
    take the boundary value through the right-hand side.
    """
    bands = np.zeros((3, size))
    bands[0, 1:] = -ratio
    bands[1, :] = 1.0 + 2.0 * ratio
    bands[2, :-1] = -ratio
    if boundary == "neumann":
        bands[1, 0] = bands[1, -1] = 1.0 + ratio
    return bands


@dataclass(frozen=True, kw_only=True, eq=False)
class AxisSolver:
    """Implicit 1-D diffusion solve for one substrate and timestep.

    The tridiagonal system is inverted once with ``solve_banded``; each sweep
    then solves all rows (or columns) of the grid in one product.
    """

    ratio: float
    inverse: Array
    boundary_value: float
    dirichlet: bool

    @classmethod
    def build(
        cls, substrate: SubstrateSpec, size: int, dx: float, dt: float
    ) -> "AxisSolver":
        """Factor the system of ``substrate`` for a grid of ``size`` voxels."""
        ratio = substrate.diffusion_coefficient * dt / dx**2
        bands = tridiagonal_bands(size, ratio, substrate.boundary)
        return cls(
            ratio=ratio,
            inverse=solve_banded((1, 1), bands, np.eye(size)),
            boundary_value=substrate.boundary_value,
            dirichlet=substrate.boundary == "dirichlet",
        )

    def sweep_x(self, field: Array) -> Array:
        """Solve along axis 0 for every column index."""
        rhs = field.copy()
        if self.dirichlet:
            rhs[0, :] += self.ratio * self.boundary_value
            rhs[-1, :] += self.ratio * self.boundary_value
        solved: Array = self.inverse @ rhs
        return solved

    def sweep_y(self, field: Array) -> Array:
        """Solve along axis 1 for every row index."""
        rhs = field.copy()
        if self.dirichlet:
            rhs[:, 0] += self.ratio * self.boundary_value
            rhs[:, -1] += self.ratio * self.boundary_value
        solved: Array = rhs @ self.inverse.T
        return solved


@lru_cache(maxsize=32)
def _build_solvers(
    substrates: tuple[SubstrateSpec, ...], size: int, dx: float, dt: float
) -> Sequence[AxisSolver]:
    return tuple(AxisSolver.build(s, size, dx, dt) for s in substrates)


def axis_solvers(environment: Microenvironment, dt: float) -> Sequence[AxisSolver]:
    """Solvers of every substrate, built once per grid and timestep."""
    return _build_solvers(
        tuple(environment.substrates), environment.grid_size, environment.dx, dt
    )


def _secretors(
    cells: Cells, cfg: SimConfig
) -> Mapping[Substrate, tuple[NDArray[np.int64], float]]:
    tumour = cells.live(CellKind.TUMOUR)
    cargo = cells.live(CellKind.CARGO)
    free_cargo = cargo[(cells.attached_to[cargo] < 0) & ~cells.releasing[cargo]]
    return {
        Substrate.C1: (tumour, cfg.tumour_c1_secretion),
        Substrate.C2: (free_cargo, cfg.cargo_c2_secretion),
        Substrate.DRUG: (cargo[cells.releasing[cargo]], cfg.cargo_drug_secretion),
    }


def source_terms(state: SimState, cfg: SimConfig) -> SourceTerms:
    """Aggregate cell secretion and uptake rates into voxel rates.

    A cell contributes its rate weighted by the ratio of its area to the voxel
    area. Tumour cells take up oxygen and secrete c1; workers and cargo take up
    oxygen; free cargo secretes c2 and releasing cargo secretes drug.
    """
    env, cells = state.environment, state.cells
    terms = SourceTerms.none(env.fields.shape)
    weight = np.pi * cells.radius**2 / env.dx**2

    uptake_rates = {
        CellKind.TUMOUR: cfg.tumour_o2_uptake,
        CellKind.WORKER: cfg.worker_o2_uptake,
        CellKind.CARGO: cfg.cargo_o2_uptake,
    }
    for kind, rate in uptake_rates.items():
        ids = cells.live(kind)
        i, j = env.voxel_of(cells.positions[ids])
        np.add.at(terms.uptake[Substrate.OXYGEN], (i, j), rate * weight[ids])

    for substrate, (ids, rate) in _secretors(cells, cfg).items():
        i, j = env.voxel_of(cells.positions[ids])
        np.add.at(terms.secretion[substrate], (i, j), rate * weight[ids])
    terms.supply[:] = terms.secretion * cfg.secretion_saturation
    return terms


def apply_sources(fields: Array, terms: SourceTerms, dt: float) -> None:
    """Implicit secretion toward saturation and first-order uptake, in place."""
    fields += dt * terms.supply
    fields /= 1.0 + dt * (terms.secretion + terms.uptake)


def apply_decay(fields: Array, substrates: Sequence[SubstrateSpec], dt: float) -> None:
    """Implicit decay ``rho / (1 + dt * lambda)``, in place."""
    for index, substrate in enumerate(substrates):
        if substrate.decay_rate:
            fields[index] /= 1.0 + dt * substrate.decay_rate


def apply_diffusion(environment: Microenvironment, dt: float) -> None:
    """One LOD diffusion step of every substrate, in place."""
    for index, solver in enumerate(axis_solvers(environment, dt)):
        if solver.ratio == 0.0:
            continue
        field = environment.fields[index]
        environment.fields[index] = solver.sweep_y(solver.sweep_x(field))


def step_microenvironment(
    state: SimState,
    cfg: SimConfig,
    dt: float,
    terms: SourceTerms | None = None,
) -> None:
    """Advance every substrate by ``dt``.

    ``terms`` may be passed in when the cells have not moved since they were
    computed; otherwise they are rebuilt from the current cells.

    Raises:
        ParameterError: If ``dt`` is not positive.

    """
    if dt <= 0:
        raise ParameterError(f"Diffusion timestep must be positive, got {dt}")
    env = state.environment
    if terms is None:
        terms = source_terms(state, cfg)
    apply_sources(env.fields, terms, dt)
    apply_decay(env.fields, env.substrates, dt)
    apply_diffusion(env, dt)
