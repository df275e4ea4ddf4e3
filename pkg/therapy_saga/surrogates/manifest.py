"""Surrogate manifest definition for the plugin system."""

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel

from therapy_saga.models.archive import ArchiveRecord


@dataclass(frozen=True, kw_only=True)
class SurrogateManifest[OptionsT: BaseModel, ModelT]:
    """Manifest describing a surrogate plugin.

    The manifest holds the options class and the functions that fit a model on
    the archive, optionally warm-started from the previous fit, rate candidate
    genotypes (higher utility is always better) and describe a fitted model for
    the run summary.
    """

    key: str
    options_cls: type[OptionsT]
    fit: Callable[
        [Sequence[ArchiveRecord], OptionsT, np.random.Generator, ModelT | None],
        ModelT,
    ]
    rate: Callable[[ModelT, NDArray[np.float64], float], NDArray[np.float64]]
    describe: Callable[[ModelT], Mapping[str, Any]]
