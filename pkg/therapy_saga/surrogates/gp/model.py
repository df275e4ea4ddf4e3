"""Gaussian-process regression surrogate with expected-improvement rating."""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import cho_solve, solve_triangular

from therapy_saga.errors import ModelFitError, NumericError
from therapy_saga.models.archive import ArchiveRecord, training_set
from therapy_saga.numopt import Vector, lbfgs_minimize
from therapy_saga.surrogates.acquisition import expected_improvement_batch
from therapy_saga.surrogates.base import TargetScaling, is_constant
from therapy_saga.surrogates.gp.config import GpOptions
from therapy_saga.surrogates.gp.kernel import (
    Matrix,
    gp_log_marginal_likelihood,
    rbf_kernel_matrix,
    robust_cholesky,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True, kw_only=True, eq=False)
class GpModel:
    """A fitted GP with its cached Cholesky factor.

    ``training_targets`` and ``alpha`` are on the standardized scale.
    """

    training_inputs: Matrix
    training_targets: NDArray[np.float64]
    target_mean: float
    target_std: float
    log_lengthscale: float
    log_signal_std: float
    log_noise_std: float
    cholesky_factor: Matrix
    alpha: NDArray[np.float64]
    jitter: float = 0.0

    @property
    def lengthscale(self) -> float:
        """Kernel lengthscale in normalized input units."""
        return float(np.exp(self.log_lengthscale))

    @property
    def signal_var(self) -> float:
        """Kernel signal variance on the standardized scale."""
        return float(np.exp(2 * self.log_signal_std))

    @property
    def hyperparams(self) -> Vector:
        """Log lengthscale, log signal std and log noise std."""
        theta: Vector = np.array(
            [self.log_lengthscale, self.log_signal_std, self.log_noise_std]
        )
        return theta


def build_gp_model(
    inputs: ArrayLike,
    targets: ArrayLike,
    hyperparams: ArrayLike,
    opts: GpOptions | None = None,
) -> GpModel:
    """Condition a GP with fixed hyperparameters on raw targets."""
    opts = opts or GpOptions()
    X = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    scaling = TargetScaling.fit(targets)
    z = scaling.forward(targets)
    theta = np.asarray(hyperparams, dtype=np.float64)
    log_ell, log_sf, log_sn = (float(v) for v in theta)
    K = rbf_kernel_matrix(X, X, np.exp(log_ell), np.exp(2 * log_sf))
    K += np.exp(2 * log_sn) * np.eye(len(z))
    L, jitter = robust_cholesky(K, opts.initial_jitter, opts.max_jitter)
    return GpModel(
        training_inputs=X,
        training_targets=z,
        target_mean=scaling.mean,
        target_std=scaling.std,
        log_lengthscale=log_ell,
        log_signal_std=log_sf,
        log_noise_std=log_sn,
        cholesky_factor=L,
        alpha=cho_solve((L, True), z),
        jitter=jitter,
    )


def sample_initial_hyperparams(rng: np.random.Generator, opts: GpOptions) -> Vector:
    """Draw a restart point log-uniformly from the configured ranges."""
    ranges = (opts.lengthscale_range, opts.signal_std_range, opts.noise_std_range)
    point: Vector = np.array(
        [rng.uniform(np.log(lo), np.log(hi)) for lo, hi in ranges]
    )
    return point


def default_hyperparams(opts: GpOptions) -> Vector:
    """Log-scale centre of the configured hyperparameter ranges."""
    ranges = (opts.lengthscale_range, opts.signal_std_range, opts.noise_std_range)
    centre: Vector = np.array(
        [0.5 * (np.log(lo) + np.log(hi)) for lo, hi in ranges]
    )
    return centre


def _condition(
    X: Matrix, y: NDArray[np.float64], theta: Vector, opts: GpOptions
) -> GpModel:
    try:
        return build_gp_model(X, y, theta, opts)
    except NumericError as e:
        raise ModelFitError(f"Could not condition the fitted GP: {e}") from e


def gp_fit(
    archive: Sequence[ArchiveRecord],
    opts: GpOptions | None = None,
    rng: np.random.Generator | None = None,
    previous: GpModel | None = None,
) -> GpModel:
    """Fit GP hyperparameters on the full archive by maximum marginal likelihood.

    Each restart maximizes the log marginal likelihood with L-BFGS from a
    log-uniform starting point; the best restart wins. With ``warm_start`` set
    and a ``previous`` model, a single run starts from its hyperparameters and
    the random restarts are only used if that run fails.

    Raises:
        ModelFitError: If every restart failed numerically.

    """
    opts = opts or GpOptions()
    rng = rng if rng is not None else np.random.default_rng(0)
    X, y = training_set(archive)
    if is_constant(y):
        # The likelihood has no finite optimum; any hyperparameters predict y.
        log.debug("Constant targets, using the centre of the hyperparameter ranges")
        return _condition(X, y, default_hyperparams(opts), opts)
    z = TargetScaling.fit(y).forward(y)

    def negative_lml(theta: Vector) -> tuple[float, Vector]:
        value, gradient = gp_log_marginal_likelihood(
            theta, X, z, opts.initial_jitter, opts.max_jitter
        )
        return -value, -gradient

    if opts.warm_start and previous is not None:
        try:
            warm = lbfgs_minimize(negative_lml, previous.hyperparams, opts.lbfgs)
        except NumericError as e:
            log.debug("GP warm start failed, using random restarts: %s", e)
        else:
            return _condition(X, y, warm.x, opts)

    best: tuple[float, Vector] | None = None
    for restart in range(opts.restarts):
        theta0 = sample_initial_hyperparams(rng, opts)
        try:
            result = lbfgs_minimize(negative_lml, theta0, opts.lbfgs)
        except NumericError as e:
            log.debug("GP restart %d failed: %s", restart, e)
            continue
        if best is None or result.f < best[0]:
            best = (result.f, result.x)

    if best is None:
        raise ModelFitError(f"All {opts.restarts} GP restarts failed")
    return _condition(X, y, best[1], opts)


def gp_predict_batch(
    model: GpModel, genotypes: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Posterior mean and std, in fitness units, for each row of genotypes."""
    G = np.atleast_2d(np.asarray(genotypes, dtype=np.float64))
    k_star = rbf_kernel_matrix(
        model.training_inputs, G, model.lengthscale, model.signal_var
    )
    mean = k_star.T @ model.alpha
    v = solve_triangular(model.cholesky_factor, k_star, lower=True)
    variance = np.maximum(model.signal_var - np.sum(v * v, axis=0), 0.0)
    std = np.sqrt(variance) * model.target_std
    return mean * model.target_std + model.target_mean, std


def gp_predict(model: GpModel, genotype: ArrayLike) -> tuple[float, float]:
    """Posterior mean and std, in fitness units, at one genotype."""
    mean, std = gp_predict_batch(model, genotype)
    return float(mean[0]), float(std[0])


def rate_gp(
    model: GpModel, genotypes: ArrayLike, best_fitness: float
) -> NDArray[np.float64]:
    """Expected improvement of each candidate over the best archive fitness."""
    mean, std = gp_predict_batch(model, genotypes)
    return expected_improvement_batch(mean, std, best_fitness)


def describe_gp(model: GpModel) -> Mapping[str, Any]:
    """Fitted hyperparameters for the run summary."""
    return {
        "lengthscale": model.lengthscale,
        "signal_std": float(np.exp(model.log_signal_std)),
        "noise_std": float(np.exp(model.log_noise_std)),
        "jitter": model.jitter,
        "target_mean": model.target_mean,
        "target_std": model.target_std,
        "training_points": int(model.training_targets.size),
    }
