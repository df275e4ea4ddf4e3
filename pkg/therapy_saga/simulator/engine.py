"""Simulation driver: growth phase, injection, treatment phase."""

import logging
import time
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from therapy_saga.errors import SimulationInstabilityError
from therapy_saga.simulator.biology import step_biology
from therapy_saga.simulator.config import SUBSTRATE_NAMES, SimConfig, TherapyParams
from therapy_saga.simulator.mechanics import step_mechanics
from therapy_saga.simulator.microenvironment import source_terms, step_microenvironment
from therapy_saga.simulator.motility import step_motility_and_adhesion
from therapy_saga.simulator.state import CellKind, SimState, init_state, inject_therapy

log = logging.getLogger(__name__)

# Fields may dip this far below zero from round-off before a run is rejected.
NEGATIVE_TOLERANCE = 1e-9


@dataclass(frozen=True, kw_only=True)
class CountSample:
    """Live cells of each kind at one time."""

    time: float
    tumour: int
    worker: int
    cargo: int


@dataclass(frozen=True, kw_only=True)
class SnapshotRow:
    """Position and status of one cell at a save time."""

    time: float
    cell_id: int
    kind: str
    x: float
    y: float
    alive: bool


@dataclass(frozen=True, kw_only=True)
class SimOutcome:
    """Result of one simulation; ``tumour_cell_count`` is the fitness."""

    tumour_cell_count: int
    counts_over_time: Sequence[CountSample]
    seed: int
    wall_time: float
    snapshots: Sequence[SnapshotRow] = field(default_factory=tuple)


def check_fields(state: SimState) -> None:
    """Reject non-finite or clearly negative substrate values.

    Raises:
        SimulationInstabilityError: Naming the first bad field and the step.

    """
    fields = state.environment.fields
    for index, name in enumerate(SUBSTRATE_NAMES):
        values = fields[index]
        if not np.all(np.isfinite(values)):
            raise SimulationInstabilityError(name, state.step, "non-finite values")
        low = float(values.min())
        if low < -NEGATIVE_TOLERANCE:
            raise SimulationInstabilityError(
                name, state.step, f"negative value {low:.3g}"
            )


def count_sample(state: SimState) -> CountSample:
    """Current live counts by kind."""
    cells = state.cells
    return CountSample(
        time=state.time,
        tumour=cells.count(CellKind.TUMOUR),
        worker=cells.count(CellKind.WORKER),
        cargo=cells.count(CellKind.CARGO),
    )


def snapshot(state: SimState) -> Sequence[SnapshotRow]:
    """One row per cell ever created, dead ones flagged."""
    cells = state.cells
    return [
        SnapshotRow(
            time=state.time,
            cell_id=i,
            kind=CellKind(int(cells.kind[i])).name.lower(),
            x=float(cells.positions[i, 0]),
            y=float(cells.positions[i, 1]),
            alive=bool(cells.alive[i]),
        )
        for i in range(len(cells))
    ]


@dataclass(kw_only=True)
class _Recorder:
    cfg: SimConfig
    counts: list[CountSample] = field(default_factory=list)
    snapshots: list[SnapshotRow] = field(default_factory=list)
    next_snapshot: float = 0.0

    def record(self, state: SimState) -> None:
        self.counts.append(count_sample(state))
        interval = self.cfg.snapshot_interval
        if interval is not None and state.time >= self.next_snapshot - 1e-9:
            self.snapshots.extend(snapshot(state))
            self.next_snapshot += interval


def advance(
    state: SimState,
    cfg: SimConfig,
    duration: float,
    rng: np.random.Generator,
    recorder: _Recorder,
    params: TherapyParams | None = None,
) -> None:
    """Run ``duration`` minutes of the nested timestep loop.

    Each biology step holds a whole number of mechanics steps, each of which
    holds a whole number of diffusion steps. Worker motility runs only when
    ``params`` is given.
    """
    mechanics_per_biology = round(cfg.biology_dt / cfg.mechanics_dt)
    diffusion_per_mechanics = round(cfg.mechanics_dt / cfg.diffusion_dt)
    for _ in range(round(duration / cfg.biology_dt)):
        for _ in range(mechanics_per_biology):
            terms = source_terms(state, cfg)
            for _ in range(diffusion_per_mechanics):
                step_microenvironment(state, cfg, cfg.diffusion_dt, terms)
                state.step += 1
                if cfg.debug_checks:
                    check_fields(state)
            check_fields(state)
            if params is not None:
                step_motility_and_adhesion(state, params, cfg, cfg.mechanics_dt, rng)
            step_mechanics(state, cfg, cfg.mechanics_dt, params)
        step_biology(state, cfg, cfg.biology_dt, rng)
        state.time += cfg.biology_dt
        recorder.record(state)


def final_count(state: SimState, cfg: SimConfig) -> int:
    """Fitness count: live tumour cells, or all live cells when configured."""
    if cfg.count_all_cells:
        return state.cells.count()
    return state.cells.count(CellKind.TUMOUR)


def run_simulation(cfg: SimConfig, params: TherapyParams, seed: int) -> SimOutcome:
    """Grow the tumour, inject the therapy and treat; return the final count.

    Raises:
        SimulationInstabilityError: If a substrate field becomes non-finite or
            negative.

    """
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    state = init_state(cfg, rng)
    recorder = _Recorder(cfg=cfg)
    recorder.record(state)

    advance(state, cfg, cfg.growth_duration, rng, recorder)
    log.debug("Growth phase done: %d tumour cells", state.cells.count(CellKind.TUMOUR))

    inject_therapy(
        state,
        cfg.injected_cells,
        cfg.worker_fraction,
        rng,
        inner_gap=cfg.injection_inner_gap,
        outer_gap=cfg.injection_outer_gap,
        cell_radius=cfg.cell_radius,
    )
    advance(state, cfg, cfg.treatment_duration, rng, recorder, params)
    log.debug(
        "Treatment phase done: %d tumour cells", state.cells.count(CellKind.TUMOUR)
    )

    return SimOutcome(
        tumour_cell_count=final_count(state, cfg),
        counts_over_time=tuple(recorder.counts),
        seed=seed,
        wall_time=time.perf_counter() - start,
        snapshots=tuple(recorder.snapshots),
    )
