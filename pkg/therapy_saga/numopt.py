"""Limited-memory BFGS minimizer and gradient verification helpers.

Both surrogates are trained with :func:`lbfgs_minimize`. The line search
brackets a step satisfying the strong Wolfe conditions and then zooms in with
safeguarded cubic interpolation.
"""

import logging
from collections import deque
from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import Field, model_validator

from therapy_saga.errors import NumericError
from therapy_saga.models.base import Model

log = logging.getLogger(__name__)

type Vector = NDArray[np.float64]
type ValueAndGradient = Callable[[Vector], tuple[float, Vector]]


class LbfgsOptions(Model):
    """Settings of the limited-memory BFGS minimizer."""

    memory: int = Field(default=10, gt=0, description="Curvature pairs kept")
    max_iterations: int = Field(default=500, gt=0)
    gradient_tolerance: float = Field(
        default=1e-6, gt=0, description="Infinity-norm convergence threshold"
    )
    wolfe_c1: float = Field(default=1e-4, gt=0, lt=1)
    wolfe_c2: float = Field(default=0.9, gt=0, lt=1)
    max_line_search_steps: int = Field(default=25, gt=0)

    @model_validator(mode="after")
    def check_wolfe_constants(self) -> Self:
        """Require 0 < c1 < c2 < 1."""
        if not self.wolfe_c1 < self.wolfe_c2:
            raise ValueError("wolfe_c1 must be smaller than wolfe_c2")
        return self


class LbfgsStatus(StrEnum):
    """Termination reason of a minimization."""

    CONVERGED = "converged"
    ITERATION_LIMIT = "iteration-limit"


@dataclass(frozen=True, kw_only=True)
class LbfgsResult:
    """Outcome of :func:`lbfgs_minimize`."""

    x: Vector
    f: float
    gradient: Vector
    status: LbfgsStatus
    iterations: int
    evaluations: int


@dataclass(frozen=True, kw_only=True)
class _Trial:
    t: float
    f: float
    g: Vector
    slope: float


@dataclass(kw_only=True)
class _Counter:
    count: int = 0


def _checked(
    objective: ValueAndGradient, x: Vector, counter: _Counter
) -> tuple[float, Vector]:
    counter.count += 1
    value, gradient = objective(x)
    gradient = np.asarray(gradient, dtype=np.float64)
    if not np.isfinite(value) or not np.all(np.isfinite(gradient)):
        raise NumericError(
            f"Objective returned non-finite value or gradient (f={value})", point=x
        )
    return float(value), gradient


def cubic_interpolate(
    lo: tuple[float, float, float],
    hi: tuple[float, float, float],
    bounds: tuple[float, float] | None = None,
) -> float:
    """Minimizer of the cubic through two (t, f, slope) points, clipped to bounds."""
    t1, f1, d1 = lo
    t2, f2, d2 = hi
    xmin, xmax = bounds if bounds is not None else (min(t1, t2), max(t1, t2))
    e = d1 + d2 - 3 * (f1 - f2) / (t1 - t2)
    disc = e * e - d1 * d2
    if disc < 0:
        return (xmin + xmax) / 2.0
    root = np.sqrt(disc)
    if t1 <= t2:
        t = t2 - (t2 - t1) * ((d2 + root - e) / (d2 - d1 + 2 * root))
    else:
        t = t1 - (t1 - t2) * ((d1 + root - e) / (d1 - d2 + 2 * root))
    if not np.isfinite(t):
        return (xmin + xmax) / 2.0
    return float(min(max(t, xmin), xmax))


def _zoom(
    phi: Callable[[float], _Trial],
    start: _Trial,
    lo: _Trial,
    hi: _Trial,
    opts: LbfgsOptions,
    steps_left: int,
) -> _Trial | None:
    for _ in range(steps_left):
        left, right = min(lo.t, hi.t), max(lo.t, hi.t)
        width = right - left
        if width <= 1e-14 * max(1.0, right):
            return None
        t = cubic_interpolate((lo.t, lo.f, lo.slope), (hi.t, hi.f, hi.slope))
        # Keep the trial away from the bracket ends.
        if min(t - left, right - t) < 0.1 * width:
            t = left + 0.5 * width
        trial = phi(t)
        armijo = start.f + opts.wolfe_c1 * t * start.slope
        if trial.f > armijo or trial.f >= lo.f:
            hi = trial
            continue
        if abs(trial.slope) <= -opts.wolfe_c2 * start.slope:
            return trial
        if trial.slope * (hi.t - lo.t) >= 0:
            hi = lo
        lo = trial
    return None


def strong_wolfe_search(
    phi: Callable[[float], _Trial],
    start: _Trial,
    t_init: float,
    opts: LbfgsOptions,
) -> _Trial | None:
    """Find a step satisfying the strong Wolfe conditions, or None on failure."""
    prev = start
    t = t_init
    for step in range(opts.max_line_search_steps):
        trial = phi(t)
        steps_left = opts.max_line_search_steps - step - 1
        if trial.f > start.f + opts.wolfe_c1 * t * start.slope or (
            step > 0 and trial.f >= prev.f
        ):
            return _zoom(phi, start, prev, trial, opts, steps_left)
        if abs(trial.slope) <= -opts.wolfe_c2 * start.slope:
            return trial
        if trial.slope >= 0:
            return _zoom(phi, start, trial, prev, opts, steps_left)
        t_next = cubic_interpolate(
            (prev.t, prev.f, prev.slope),
            (trial.t, trial.f, trial.slope),
            bounds=(t + 0.01 * (t - prev.t), 10.0 * t),
        )
        prev = trial
        t = t_next
    return None


def two_loop_direction(
    gradient: Vector, s_history: deque[Vector], y_history: deque[Vector]
) -> Vector:
    """Return -H·g using the two-loop recursion over the stored pairs."""
    q = gradient.copy()
    alphas: list[float] = []
    rhos = [1.0 / float(y @ s) for s, y in zip(s_history, y_history, strict=True)]
    for s, y, rho in zip(
        reversed(s_history), reversed(y_history), reversed(rhos), strict=True
    ):
        alpha = rho * float(s @ q)
        alphas.append(alpha)
        q -= alpha * y
    if s_history:
        s, y = s_history[-1], y_history[-1]
        q *= float(s @ y) / float(y @ y)
    for s, y, rho, alpha in zip(
        s_history, y_history, rhos, reversed(alphas), strict=True
    ):
        beta = rho * float(y @ q)
        q += (alpha - beta) * s
    direction: Vector = -q
    return direction


def lbfgs_minimize(
    objective: ValueAndGradient,
    x0: ArrayLike,
    opts: LbfgsOptions | None = None,
) -> LbfgsResult:
    """Minimize a smooth function given its value and gradient.

    Args:
        objective: Callable returning ``(value, gradient)`` at a point
        x0: Starting point
        opts: Minimizer settings, defaults when omitted

    Returns:
        Best point found with its value, gradient and termination status

    Raises:
        NumericError: If the objective returns a non-finite value or gradient

    """
    opts = opts or LbfgsOptions()
    counter = _Counter()
    x = np.array(x0, dtype=np.float64)
    f, g = _checked(objective, x, counter)
    s_history: deque[Vector] = deque(maxlen=opts.memory)
    y_history: deque[Vector] = deque(maxlen=opts.memory)

    def result(status: LbfgsStatus, iterations: int) -> LbfgsResult:
        return LbfgsResult(
            x=x,
            f=f,
            gradient=g,
            status=status,
            iterations=iterations,
            evaluations=counter.count,
        )

    if np.max(np.abs(g), initial=0.0) <= opts.gradient_tolerance:
        return result(LbfgsStatus.CONVERGED, 0)

    for iteration in range(1, opts.max_iterations + 1):
        direction = two_loop_direction(g, s_history, y_history)
        if float(g @ direction) >= 0:
            s_history.clear()
            y_history.clear()
            direction = -g

        accepted = _line_search(
            objective, x, f, g, direction, bool(s_history), opts, counter
        )
        if accepted is None:
            log.debug(
                "Line search failed at iteration %d, retrying along -g", iteration
            )
            s_history.clear()
            y_history.clear()
            direction = -g
            accepted = _line_search(objective, x, f, g, direction, False, opts, counter)
            if accepted is None:
                return result(LbfgsStatus.ITERATION_LIMIT, iteration)

        step = accepted.t * direction
        y = accepted.g - g
        if float(y @ step) > 1e-12 * float(np.linalg.norm(step) * np.linalg.norm(y)):
            s_history.append(step)
            y_history.append(y)
        x = x + step
        f, g = accepted.f, accepted.g
        if np.max(np.abs(g)) <= opts.gradient_tolerance:
            return result(LbfgsStatus.CONVERGED, iteration)

    return result(LbfgsStatus.ITERATION_LIMIT, opts.max_iterations)


def _line_search(
    objective: ValueAndGradient,
    x: Vector,
    f: float,
    g: Vector,
    direction: Vector,
    has_history: bool,
    opts: LbfgsOptions,
    counter: _Counter,
) -> _Trial | None:
    def phi(t: float) -> _Trial:
        value, gradient = _checked(objective, x + t * direction, counter)
        return _Trial(t=t, f=value, g=gradient, slope=float(gradient @ direction))

    start = _Trial(t=0.0, f=f, g=g, slope=float(g @ direction))
    # Without curvature information the first step length is a guess.
    t_init = 1.0 if has_history else min(1.0, 1.0 / float(np.sum(np.abs(g))))
    return strong_wolfe_search(phi, start, t_init, opts)


def finite_diff_grad(
    f: Callable[[Vector], float], x: ArrayLike, h: float = 1e-6
) -> Vector:
    """Central-difference gradient of a scalar function.

    Raises:
        NumericError: If f is non-finite at any sampled point.

    """
    point = np.asarray(x, dtype=np.float64)
    gradient = np.empty_like(point)
    for i in range(point.size):
        step = np.zeros_like(point)
        step[i] = h
        forward, backward = f(point + step), f(point - step)
        if not (np.isfinite(forward) and np.isfinite(backward)):
            raise NumericError(
                "Non-finite function value in finite differences", point=point
            )
        gradient[i] = (forward - backward) / (2.0 * h)
    return gradient
