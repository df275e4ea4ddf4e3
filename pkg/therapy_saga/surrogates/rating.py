"""Rating of candidate genotypes on a fitted surrogate."""

import numpy as np
from numpy.typing import ArrayLike, NDArray

from therapy_saga.surrogates.gp.model import GpModel, rate_gp
from therapy_saga.surrogates.mlp.model import MlpModel, rate_mlp


def rate_candidates(
    model: GpModel | MlpModel, genotypes: ArrayLike, best_fitness: float
) -> NDArray[np.float64]:
    """Utility of each row of ``genotypes``; higher is more promising.

    A GP rates by expected improvement over ``best_fitness``, an MLP by its
    negated predicted fitness.
    """
    match model:
        case GpModel():
            return rate_gp(model, genotypes, best_fitness)
        case MlpModel():
            return rate_mlp(model, genotypes, best_fitness)


def rate_candidate(
    model: GpModel | MlpModel, genotype: ArrayLike, best_fitness: float
) -> float:
    """Utility of a single genotype."""
    genotypes = np.atleast_2d(np.asarray(genotype))
    return float(rate_candidates(model, genotypes, best_fitness)[0])
