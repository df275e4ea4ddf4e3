"""Single-hidden-layer ReLU network surrogate rated by predicted fitness."""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from therapy_saga.errors import ModelFitError, NumericError
from therapy_saga.models.archive import ArchiveRecord, training_set
from therapy_saga.numopt import Vector, lbfgs_minimize
from therapy_saga.surrogates.base import TargetScaling, is_constant
from therapy_saga.surrogates.mlp.config import MlpOptions

log = logging.getLogger(__name__)

type Matrix = NDArray[np.float64]


@dataclass(frozen=True, kw_only=True, eq=False)
class MlpModel:
    """A fitted network; the output is on the standardized target scale."""

    hidden_weights: Matrix
    hidden_biases: Vector
    output_weights: Vector
    output_bias: float
    input_offset: Vector
    input_scale: Vector
    target_mean: float
    target_std: float
    training_loss: float = 0.0

    @property
    def hidden_units(self) -> int:
        """Number of ReLU units."""
        return int(self.hidden_biases.size)

    @property
    def weights(self) -> Vector:
        """Flat weight vector in the layout of :func:`unpack`."""
        theta: Vector = np.concatenate(
            [
                self.hidden_weights.ravel(),
                self.hidden_biases,
                self.output_weights,
                [self.output_bias],
            ]
        )
        return theta


def parameter_count(n_inputs: int, hidden_units: int) -> int:
    """Length of the flat weight vector."""
    return hidden_units * n_inputs + 2 * hidden_units + 1


def unpack(
    theta: Vector, n_inputs: int, hidden_units: int
) -> tuple[Matrix, Vector, Vector, float]:
    """Split a flat weight vector into (W1, b1, w2, b2)."""
    h, n = hidden_units, n_inputs
    W1 = theta[: h * n].reshape(h, n)
    b1 = theta[h * n : h * n + h]
    w2 = theta[h * n + h : h * n + 2 * h]
    return W1, b1, w2, float(theta[-1])


def mlp_loss_and_gradient(
    theta: Vector, inputs: Matrix, targets: Vector, hidden_units: int
) -> tuple[float, Vector]:
    """Mean squared error of the network and its backpropagated gradient."""
    n_points, n_inputs = inputs.shape
    W1, b1, w2, b2 = unpack(theta, n_inputs, hidden_units)
    pre = inputs @ W1.T + b1
    hidden = np.maximum(pre, 0.0)
    residual = hidden @ w2 + b2 - targets
    loss = float(residual @ residual) / n_points

    d_out = 2.0 * residual / n_points
    d_hidden = np.outer(d_out, w2) * (pre > 0)
    gradient = np.concatenate(
        [
            (d_hidden.T @ inputs).ravel(),
            d_hidden.sum(axis=0),
            hidden.T @ d_out,
            [d_out.sum()],
        ]
    )
    return loss, gradient


def initial_weights(
    rng: np.random.Generator, n_inputs: int, hidden_units: int, scale: float
) -> Vector:
    """Uniform weights in [-scale, scale] shrunk by 1/sqrt(fan-in)."""
    hidden_bound = scale / np.sqrt(n_inputs)
    output_bound = scale / np.sqrt(hidden_units)
    theta: Vector = np.concatenate(
        [
            rng.uniform(-hidden_bound, hidden_bound, hidden_units * n_inputs),
            rng.uniform(-hidden_bound, hidden_bound, hidden_units),
            rng.uniform(-output_bound, output_bound, hidden_units),
            [0.0],
        ]
    )
    return theta


def _as_model(
    theta: Vector, n_inputs: int, hidden_units: int, scaling: TargetScaling, loss: float
) -> MlpModel:
    W1, b1, w2, b2 = unpack(theta, n_inputs, hidden_units)
    return MlpModel(
        hidden_weights=W1.copy(),
        hidden_biases=b1.copy(),
        output_weights=w2.copy(),
        output_bias=b2,
        input_offset=np.zeros(n_inputs),
        input_scale=np.ones(n_inputs),
        target_mean=scaling.mean,
        target_std=scaling.std,
        training_loss=loss,
    )


def mlp_fit(
    archive: Sequence[ArchiveRecord],
    opts: MlpOptions | None = None,
    rng: np.random.Generator | None = None,
    previous: MlpModel | None = None,
) -> MlpModel:
    """Train the network on (genotype, mean fitness) pairs; best restart wins.

    With ``warm_start`` set and a ``previous`` model of the same shape, a single
    run starts from its weights and the random restarts are only used if that
    run fails.

    Raises:
        ModelFitError: If every restart hit a non-finite loss.

    """
    opts = opts or MlpOptions()
    rng = rng if rng is not None else np.random.default_rng(0)
    X, y = training_set(archive)
    scaling = TargetScaling.fit(y)
    n_inputs, hidden = X.shape[1], opts.hidden_units

    if is_constant(y):
        # The output bias alone reproduces constant targets exactly.
        log.debug("Constant targets, fitting the bias-only network")
        zeros = np.zeros(parameter_count(n_inputs, hidden))
        return _as_model(zeros, n_inputs, hidden, scaling, 0.0)

    z = scaling.forward(y)

    def objective(theta: Vector) -> tuple[float, Vector]:
        return mlp_loss_and_gradient(theta, X, z, hidden)

    if (
        opts.warm_start
        and previous is not None
        and previous.weights.size == parameter_count(n_inputs, hidden)
    ):
        try:
            warm = lbfgs_minimize(objective, previous.weights, opts.lbfgs)
        except NumericError as e:
            log.debug("MLP warm start failed, using random restarts: %s", e)
        else:
            return _as_model(warm.x, n_inputs, hidden, scaling, warm.f)

    best: tuple[float, Vector] | None = None
    last_error: NumericError | None = None
    for restart in range(opts.restarts):
        theta0 = initial_weights(rng, n_inputs, hidden, opts.init_scale)
        try:
            result = lbfgs_minimize(objective, theta0, opts.lbfgs)
        except NumericError as e:
            log.debug("MLP restart %d failed: %s", restart, e)
            last_error = e
            continue
        if best is None or result.f < best[0]:
            best = (result.f, result.x)

    if best is None:
        raise ModelFitError(f"All {opts.restarts} MLP restarts failed") from last_error
    return _as_model(best[1], n_inputs, hidden, scaling, best[0])


def mlp_predict_batch(model: MlpModel, genotypes: ArrayLike) -> Vector:
    """Predicted fitness, in fitness units, for each row of genotypes."""
    G = np.atleast_2d(np.asarray(genotypes, dtype=np.float64))
    scaled = (G - model.input_offset) * model.input_scale
    hidden = np.maximum(scaled @ model.hidden_weights.T + model.hidden_biases, 0.0)
    out = hidden @ model.output_weights + model.output_bias
    prediction: Vector = out * model.target_std + model.target_mean
    return prediction


def mlp_predict(model: MlpModel, genotype: ArrayLike) -> float:
    """Predicted fitness at one genotype."""
    return float(mlp_predict_batch(model, genotype)[0])


def rate_mlp(model: MlpModel, genotypes: ArrayLike, best_fitness: float) -> Vector:
    """Negated predicted fitness, so that higher utility is better.

    ``best_fitness`` is unused; the rating does not depend on the archive.
    """
    utility: Vector = -mlp_predict_batch(model, genotypes)
    return utility


def describe_mlp(model: MlpModel) -> Mapping[str, Any]:
    """Training summary for the run summary."""
    return {
        "hidden_units": model.hidden_units,
        "training_loss": model.training_loss,
        "target_mean": model.target_mean,
        "target_std": model.target_std,
    }
