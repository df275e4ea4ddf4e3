"""Reading and writing run artifacts.

A run directory holds:

- ``archive.csv``: one row per evaluated candidate, columns
  ``evaluation_index``, the physical parameters in canonical order,
  ``sample_0 .. sample_{k-1}`` and ``mean_fitness``;
- ``trace.csv``: ``evaluation_index, best_fitness``;
- ``summary.yaml``: seeds, best candidate, surrogate fits and warnings;
- ``config.yaml``: the fully defaulted configuration;
- ``timing.yaml``: wall time, kept apart so the other files are reproducible.
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import yaml
from numpy.typing import NDArray

from therapy_saga.errors import DataError
from therapy_saga.models.result import RunResult
from therapy_saga.param_space import CANONICAL_SPACE, denormalize
from therapy_saga.simulator.engine import CountSample, SnapshotRow
from therapy_saga.stats import summarize

log = logging.getLogger(__name__)

ARCHIVE_FILE = "archive.csv"
TRACE_FILE = "trace.csv"
SUMMARY_FILE = "summary.yaml"
CONFIG_FILE = "config.yaml"
TIMING_FILE = "timing.yaml"

PARAMETER_COLUMNS = tuple(spec.name for spec in CANONICAL_SPACE)


def sample_columns(replicates: int) -> Sequence[str]:
    """Names of the replicate sample columns."""
    return [f"sample_{r}" for r in range(replicates)]


def archive_frame(result: RunResult) -> pd.DataFrame:
    """Archive table with physical parameter values."""
    replicates = len(result.archive[0].samples) if result.archive else 0
    rows = [
        [
            record.evaluation_index,
            *denormalize(record.genotype),
            *record.samples,
            record.mean_fitness,
        ]
        for record in result.archive
    ]
    columns = [
        "evaluation_index",
        *PARAMETER_COLUMNS,
        *sample_columns(replicates),
        "mean_fitness",
    ]
    return pd.DataFrame(rows, columns=columns)


def trace_frame(result: RunResult) -> pd.DataFrame:
    """Best-so-far fitness after every evaluation."""
    return pd.DataFrame(
        {
            "evaluation_index": [p.evaluation_index for p in result.best_trace],
            "best_fitness": [p.best_fitness for p in result.best_trace],
        }
    )


def run_summary(result: RunResult, population_size: int) -> dict[str, Any]:
    """Deterministic summary document of a run."""
    best = result.best_record
    stats = summarize(best.samples)
    return {
        "algorithm": result.algorithm,
        "population_size": population_size,
        "evaluations": len(result.archive),
        "seeds": asdict(result.seeds),
        "best": {
            "evaluation_index": best.evaluation_index,
            "mean_fitness": best.mean_fitness,
            "parameters": dict(
                zip(
                    PARAMETER_COLUMNS,
                    map(float, denormalize(best.genotype)),
                    strict=True,
                )
            ),
            "samples": [float(s) for s in best.samples],
            "sd": stats.sd,
            "median": stats.median,
            "min": stats.min,
            "excess_kurtosis": stats.excess_kurtosis,
        },
        "model_fits": [
            {
                "evaluation_index": fit.evaluation_index,
                "seed": fit.seed,
                "parameters": {k: _plain(v) for k, v in fit.parameters.items()},
            }
            for fit in result.model_fits
        ],
        "warnings": list(result.warnings),
    }


def _plain(value: Any) -> Any:
    """Convert numpy scalars so YAML stays language-neutral."""
    if isinstance(value, np.generic):
        return value.item()
    return value


def write_run(
    run_dir: Path, result: RunResult, config_yaml: str, population_size: int
) -> None:
    """Write every artifact of a run, creating the directory."""
    run_dir.mkdir(parents=True, exist_ok=True)
    archive_frame(result).to_csv(run_dir / ARCHIVE_FILE, index=False)
    trace_frame(result).to_csv(run_dir / TRACE_FILE, index=False)
    (run_dir / SUMMARY_FILE).write_text(
        yaml.safe_dump(run_summary(result, population_size), sort_keys=False)
    )
    (run_dir / CONFIG_FILE).write_text(config_yaml)
    (run_dir / TIMING_FILE).write_text(yaml.safe_dump({"wall_time": result.wall_time}))
    log.info("Wrote run artifacts to %s", run_dir)


def read_archive(run_dir: Path) -> pd.DataFrame:
    """Load and check the archive table of a run.

    Raises:
        DataError: If the file is missing, unreadable or lacks required columns.

    """
    path = run_dir / ARCHIVE_FILE
    if not path.exists():
        raise DataError(f"Archive not found: {path}")
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"Unreadable archive {path}: {e}") from e
    required = {"evaluation_index", "mean_fitness", *PARAMETER_COLUMNS}
    missing = required - set(frame.columns)
    if missing:
        raise DataError(f"Archive {path} lacks columns: {sorted(missing)}")
    if frame.empty:
        raise DataError(f"Archive {path} has no rows")
    if not replicate_columns(frame):
        raise DataError(f"Archive {path} has no sample columns")
    return frame


def read_summary(run_dir: Path) -> Mapping[str, Any]:
    """Load the summary document of a run.

    Raises:
        DataError: If the file is missing or not a YAML mapping.

    """
    path = run_dir / SUMMARY_FILE
    if not path.exists():
        raise DataError(f"Summary not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise DataError(f"Invalid YAML in {path}: {e}") from e
    if not isinstance(data, dict):
        raise DataError(f"Summary {path} must contain a mapping")
    return data


def replicate_columns(frame: pd.DataFrame) -> Sequence[str]:
    """Sample columns of an archive table, in replicate order."""
    columns = [c for c in frame.columns if str(c).startswith("sample_")]
    return sorted(columns, key=lambda c: int(str(c).removeprefix("sample_")))


def best_row(frame: pd.DataFrame) -> "pd.Series[Any]":
    """Row with the lowest mean fitness, earliest evaluation on ties."""
    ordered = frame.sort_values("evaluation_index", kind="stable")
    return ordered.loc[ordered["mean_fitness"].idxmin()]


def best_samples(frame: pd.DataFrame) -> NDArray[np.float64]:
    """Replicate samples of the best candidate."""
    return best_row(frame)[list(replicate_columns(frame))].to_numpy(dtype=np.float64)


def archive_trace(frame: pd.DataFrame) -> pd.DataFrame:
    """Best-so-far mean fitness rebuilt from an archive table."""
    ordered = frame.sort_values("evaluation_index", kind="stable")
    return pd.DataFrame(
        {
            "evaluation_index": ordered["evaluation_index"].to_numpy(),
            "best_fitness": ordered["mean_fitness"].cummin().to_numpy(),
        }
    )


def scatter_frames(
    runs: Sequence[tuple[str, pd.DataFrame]],
) -> Mapping[str, pd.DataFrame]:
    """One table per parameter: ``value, mean_fitness, algorithm`` over all runs."""
    tables: dict[str, pd.DataFrame] = {}
    for name in PARAMETER_COLUMNS:
        parts = [
            pd.DataFrame(
                {
                    "value": frame[name],
                    "mean_fitness": frame["mean_fitness"],
                    "algorithm": label,
                }
            )
            for label, frame in runs
        ]
        tables[name] = pd.concat(parts, ignore_index=True)
    return tables


def counts_frame(counts: Sequence[CountSample]) -> pd.DataFrame:
    """Cell counts over time of one simulation."""
    return pd.DataFrame(
        [asdict(c) for c in counts], columns=["time", "tumour", "worker", "cargo"]
    )


def snapshot_frame(rows: Sequence[SnapshotRow]) -> pd.DataFrame:
    """Cell snapshot table for rendering."""
    return pd.DataFrame(
        [asdict(r) for r in rows],
        columns=["time", "cell_id", "kind", "x", "y", "alive"],
    )
