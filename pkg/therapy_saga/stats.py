"""Sample summaries and the Wilcoxon rank-sum test."""

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import kurtosis, norm, rankdata

from therapy_saga.errors import ParameterError

type Alternative = Literal["two-sided", "less", "greater"]

# Pooled sizes up to this use the exact permutation distribution.
EXACT_MAX_POOLED = 12

# Rank sums this close count as equally extreme.
RANK_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True, kw_only=True)
class SampleSummary:
    """Descriptive statistics of one sample.

    ``excess_kurtosis`` is None when undefined (fewer than four samples or
    zero spread).
    """

    mean: float
    sd: float
    median: float
    min: float
    max: float
    excess_kurtosis: float | None
    n: int


@dataclass(frozen=True, kw_only=True)
class RankSumResult:
    """Outcome of :func:`wilcoxon_rank_sum`."""

    statistic: float
    p_value: float
    method: Literal["exact", "normal"]
    alternative: Alternative


def _as_sample(values: ArrayLike, name: str) -> NDArray[np.float64]:
    sample = np.asarray(values, dtype=np.float64).ravel()
    if sample.size == 0:
        raise ParameterError(f"Sample {name} is empty")
    return sample


def summarize(samples: ArrayLike) -> SampleSummary:
    """Mean, sample SD, median, extremes and Fisher excess kurtosis.

    Kurtosis uses the bias-corrected small-sample estimator.

    Raises:
        ParameterError: If ``samples`` is empty.

    """
    x = _as_sample(samples, "samples")
    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    excess = (
        float(kurtosis(x, fisher=True, bias=False)) if x.size >= 4 and sd > 0 else None
    )
    return SampleSummary(
        mean=float(np.mean(x)),
        sd=sd,
        median=float(np.median(x)),
        min=float(np.min(x)),
        max=float(np.max(x)),
        excess_kurtosis=excess,
        n=int(x.size),
    )


def _exact_p_value(
    ranks: NDArray[np.float64], n_a: int, observed: float, alternative: Alternative
) -> float:
    expected = n_a * (ranks.size + 1) / 2.0
    sums = np.fromiter(
        (ranks[list(c)].sum() for c in combinations(range(ranks.size), n_a)),
        dtype=np.float64,
        count=comb(ranks.size, n_a),
    )
    match alternative:
        case "two-sided":
            threshold = abs(observed - expected) - RANK_SUM_TOLERANCE
            extreme = np.abs(sums - expected) >= threshold
        case "less":
            extreme = sums <= observed + RANK_SUM_TOLERANCE
        case "greater":
            extreme = sums >= observed - RANK_SUM_TOLERANCE
    return float(np.mean(extreme))


def _normal_p_value(
    ranks: NDArray[np.float64], n_a: int, observed: float, alternative: Alternative
) -> float:
    n_b = ranks.size - n_a
    n = ranks.size
    expected = n_a * (n + 1) / 2.0
    _, ties = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(ties**3 - ties)) / (n * (n - 1)) if n > 1 else 0.0
    variance = n_a * n_b / 12.0 * ((n + 1) - tie_term)
    if variance <= 0:
        return 1.0
    sd = np.sqrt(variance)
    match alternative:
        case "two-sided":
            z = max(abs(observed - expected) - 0.5, 0.0) / sd
            return float(min(1.0, 2.0 * norm.sf(z)))
        case "less":
            return float(norm.cdf((observed - expected + 0.5) / sd))
        case "greater":
            return float(norm.sf((observed - expected - 0.5) / sd))


def wilcoxon_rank_sum(
    a: ArrayLike, b: ArrayLike, alternative: Alternative = "two-sided"
) -> RankSumResult:
    """Wilcoxon rank-sum test of sample ``a`` against sample ``b``.

    The statistic is the sum of the midranks of ``a`` in the pooled sample.
    Pooled samples of at most twelve values use the exact permutation
    distribution; larger ones use the normal approximation with continuity
    correction and tie-adjusted variance. ``less`` tests whether ``a`` tends
    to be smaller than ``b``.

    Raises:
        ParameterError: If either sample is empty.

    """
    x, y = _as_sample(a, "a"), _as_sample(b, "b")
    ranks = rankdata(np.concatenate([x, y]))
    statistic = float(ranks[: x.size].sum())
    if ranks.size <= EXACT_MAX_POOLED:
        p_value = _exact_p_value(ranks, x.size, statistic, alternative)
        method: Literal["exact", "normal"] = "exact"
    else:
        p_value = _normal_p_value(ranks, x.size, statistic, alternative)
        method = "normal"
    return RankSumResult(
        statistic=statistic, p_value=p_value, method=method, alternative=alternative
    )
