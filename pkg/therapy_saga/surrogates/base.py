"""Shared pieces of the regression surrogates."""

from dataclasses import dataclass
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray

# Below this spread the targets are treated as constant.
MIN_TARGET_STD = 1e-12


@dataclass(frozen=True, kw_only=True)
class TargetScaling:
    """Affine standardization of fitness targets to zero mean, unit variance."""

    mean: float
    std: float

    @classmethod
    def fit(cls, targets: ArrayLike) -> Self:
        """Estimate the scaling; constant targets keep std = 1."""
        y = np.asarray(targets, dtype=np.float64)
        std = float(np.std(y))
        return cls(mean=float(np.mean(y)), std=std if std > MIN_TARGET_STD else 1.0)

    def forward(self, targets: ArrayLike) -> NDArray[np.float64]:
        """Standardize raw targets."""
        raw = np.asarray(targets, dtype=np.float64)
        z: NDArray[np.float64] = (raw - self.mean) / self.std
        return z

    def inverse(self, standardized: ArrayLike) -> NDArray[np.float64]:
        """Map standardized values back to fitness units."""
        z = np.asarray(standardized, dtype=np.float64)
        y: NDArray[np.float64] = z * self.std + self.mean
        return y


def is_constant(targets: ArrayLike) -> bool:
    """Whether all targets are equal up to the scaling guard."""
    return float(np.std(np.asarray(targets, dtype=np.float64))) <= MIN_TARGET_STD
