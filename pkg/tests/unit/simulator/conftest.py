"""Fixtures for simulator tests."""

from collections.abc import Callable
from typing import Any

import pytest

from therapy_saga.simulator.config import SimConfig, TherapyParams


@pytest.fixture
def tiny_config() -> Callable[..., SimConfig]:
    """Build a 10x10-voxel configuration with short phases."""

    def build(**overrides: Any) -> SimConfig:
        values: dict[str, Any] = {
            "domain_half_width": 100.0,
            "dx": 20.0,
            "tumour_radius": 20.0,
            "mechanics_dt": 0.5,
            "diffusion_dt": 0.05,
            "growth_duration": 12.0,
            "treatment_duration": 12.0,
            "injected_cells": 10,
            "injection_outer_gap": 60.0,
        }
        return SimConfig(**{**values, **overrides})

    return build


@pytest.fixture
def params() -> TherapyParams:
    """Therapy at the centre of every parameter range."""
    return TherapyParams(
        attached_bias=0.5,
        unattached_bias=0.5,
        worker_adhesion=5.0,
        worker_repulsion=5.0,
        persistence_time=5.0,
        cargo_release_o2_threshold=10.0,
    )
