"""Expected-improvement acquisition for minimization."""

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import norm

from therapy_saga.errors import ParameterError


def expected_improvement_batch(
    mean: ArrayLike, std: ArrayLike, best: float
) -> NDArray[np.float64]:
    """Expected improvement over ``best`` for arrays of predictive moments.

    Candidates with zero predictive std get zero utility.

    Raises:
        ParameterError: If any std is negative.

    """
    mu = np.asarray(mean, dtype=np.float64)
    sigma = np.asarray(std, dtype=np.float64)
    if np.any(sigma < 0):
        raise ParameterError("Predictive std must be non-negative")
    ei = np.zeros(np.broadcast(mu, sigma).shape, dtype=np.float64)
    positive = np.broadcast_to(sigma > 0, ei.shape)
    mu_b = np.broadcast_to(mu, ei.shape)[positive]
    sigma_b = np.broadcast_to(sigma, ei.shape)[positive]
    improvement = best - mu_b
    z = improvement / sigma_b
    ei[positive] = improvement * norm.cdf(z) + sigma_b * norm.pdf(z)
    # Cancellation can leave tiny negatives deep in the left tail.
    result: NDArray[np.float64] = np.maximum(ei, 0.0)
    return result


def expected_improvement(mean: float, std: float, best: float) -> float:
    """Expected improvement of a single candidate; see the batch version."""
    return float(expected_improvement_batch(mean, std, best))
