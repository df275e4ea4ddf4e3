"""Squared-exponential kernel and the GP log marginal likelihood."""

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import LinAlgError, cho_solve, cholesky

from therapy_saga.errors import DimensionError, NumericError, ParameterError

log = logging.getLogger(__name__)

type Matrix = NDArray[np.float64]


def rbf_kernel(
    a: ArrayLike, b: ArrayLike, lengthscale: float, signal_var: float
) -> float:
    """Isotropic squared-exponential covariance of two points.

    Raises:
        ParameterError: If a hyperparameter is not positive.
        DimensionError: If the points differ in length.

    """
    if lengthscale <= 0 or signal_var <= 0:
        raise ParameterError("Kernel hyperparameters must be positive")
    x, y = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionError(f"Kernel inputs have shapes {x.shape} and {y.shape}")
    sq = float(np.sum((x - y) ** 2))
    return float(signal_var * np.exp(-sq / (2.0 * lengthscale**2)))


def squared_distances(A: Matrix, B: Matrix) -> Matrix:
    """Pairwise squared Euclidean distances between rows of A and B."""
    sq: Matrix = np.sum((A[:, None, :] - B[None, :, :]) ** 2, axis=-1)
    return sq


def rbf_kernel_matrix(
    A: Matrix, B: Matrix, lengthscale: float, signal_var: float
) -> Matrix:
    """Kernel matrix between the rows of A and B."""
    K: Matrix = signal_var * np.exp(-squared_distances(A, B) / (2.0 * lengthscale**2))
    return K


def robust_cholesky(
    K: Matrix, initial_jitter: float = 1e-10, max_jitter: float = 1e-6
) -> tuple[Matrix, float]:
    """Lower Cholesky factor of K, adding diagonal jitter when needed.

    Jitter starts at zero, then escalates by decades from ``initial_jitter`` up
    to ``max_jitter``.

    Returns:
        The factor and the jitter that was added

    Raises:
        NumericError: If K is not positive definite even at ``max_jitter``.

    """
    jitter = 0.0
    eye = np.eye(K.shape[0])
    while True:
        try:
            L: Matrix = cholesky(K + jitter * eye, lower=True)
            if jitter:
                log.debug("Cholesky succeeded with jitter %.1e", jitter)
            return L, jitter
        except LinAlgError:
            pass
        if jitter >= max_jitter:
            raise NumericError(
                f"Kernel matrix not positive definite at jitter {jitter:.1e}"
            )
        jitter = initial_jitter if jitter == 0.0 else min(jitter * 10.0, max_jitter)


def gp_log_marginal_likelihood(
    hyperparams: ArrayLike,
    inputs: Matrix,
    targets: ArrayLike,
    initial_jitter: float = 1e-10,
    max_jitter: float = 1e-6,
) -> tuple[float, NDArray[np.float64]]:
    """Log marginal likelihood and its gradient in log-hyperparameter space.

    Args:
        hyperparams: (log_lengthscale, log_signal_std, log_noise_std)
        inputs: Training inputs, one row per point
        targets: Standardized training targets
        initial_jitter: First jitter tried when the kernel matrix is singular
        max_jitter: Largest jitter tried

    Returns:
        The value and its gradient with respect to the three log-hyperparameters

    """
    log_ell, log_sf, log_sn = np.asarray(hyperparams, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    n = y.size
    if n < 1:
        raise ParameterError("At least one training point is required")
    ell, sf2, sn2 = np.exp(log_ell), np.exp(2 * log_sf), np.exp(2 * log_sn)
    sq = squared_distances(inputs, inputs)
    Kf = sf2 * np.exp(-sq / (2.0 * ell**2))
    L, _ = robust_cholesky(Kf + sn2 * np.eye(n), initial_jitter, max_jitter)
    alpha = cho_solve((L, True), y)

    log_det = float(np.sum(np.log(np.diag(L))))
    value = -0.5 * float(y @ alpha) - log_det - 0.5 * n * np.log(2 * np.pi)

    # d(value)/d(theta) = 0.5 * tr((alpha alpha^T - K^-1) dK/dtheta)
    inner = np.outer(alpha, alpha) - cho_solve((L, True), np.eye(n))
    dK_dlog_ell = Kf * sq / ell**2
    dK_dlog_sf = 2.0 * Kf
    gradient = np.array(
        [
            0.5 * float(np.sum(inner * dK_dlog_ell)),
            0.5 * float(np.sum(inner * dK_dlog_sf)),
            0.5 * float(np.trace(inner)) * 2.0 * sn2,
        ]
    )
    return float(value), gradient
