"""Synthetic noisy objective for fast optimizer experiments."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from therapy_saga.models.config import SyntheticObjectiveConfig
from therapy_saga.param_space import CANONICAL_SPACE, LOWER_BOUND, UPPER_BOUND

# Grid used to locate the per-dimension maximum of the separable objective.
RANGE_GRID_POINTS = 20001


@dataclass(frozen=True, kw_only=True)
class NoisySphereRastrigin:
    """Shifted sphere plus a Rastrigin ripple with additive Gaussian noise.

    ``f(x) = sum((x - c)^2) + A * sum(1 - cos(2 pi (x - c)))``, minimized at
    x = c with value 0. The noise SD is ``noise_fraction`` times the range of
    f on the genotype box. Picklable, so replicates can run in worker processes.
    """

    shift: float = 0.3
    rastrigin_amplitude: float = 1.0
    noise_fraction: float = 0.05
    dimension: int = len(CANONICAL_SPACE)

    @classmethod
    def from_config(cls, cfg: SyntheticObjectiveConfig) -> "NoisySphereRastrigin":
        """Objective described by an experiment configuration."""
        return cls(
            shift=cfg.shift,
            rastrigin_amplitude=cfg.rastrigin_amplitude,
            noise_fraction=cfg.noise_fraction,
        )

    def noiseless(self, genotype: ArrayLike) -> float:
        """Objective value without noise."""
        d = np.asarray(genotype, dtype=np.float64) - self.shift
        ripple = 1.0 - np.cos(2.0 * np.pi * d)
        return float(np.sum(d**2) + self.rastrigin_amplitude * np.sum(ripple))

    @property
    def objective_range(self) -> float:
        """Maximum minus minimum of the noiseless objective on the box."""
        d = np.linspace(LOWER_BOUND, UPPER_BOUND, RANGE_GRID_POINTS) - self.shift
        ripple = self.rastrigin_amplitude * (1.0 - np.cos(2.0 * np.pi * d))
        per_dimension = d**2 + ripple
        return float(self.dimension * per_dimension.max())

    @property
    def noise_sd(self) -> float:
        """Standard deviation of the additive noise."""
        return self.noise_fraction * self.objective_range

    def __call__(self, genotype: ArrayLike, seed: int) -> float:
        """Noisy objective value for one replicate seed."""
        noise = np.random.default_rng(seed).normal(0.0, self.noise_sd)
        return self.noiseless(genotype) + float(noise)
