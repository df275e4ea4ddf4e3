"""CLI entry point for therapy optimization experiments."""

import argparse
import asyncio
import json
import logging
import sys
from collections.abc import Mapping, Sequence
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from therapy_saga.artifacts import (
    PARAMETER_COLUMNS,
    archive_trace,
    best_row,
    best_samples,
    counts_frame,
    read_archive,
    read_summary,
    replicate_columns,
    scatter_frames,
    snapshot_frame,
    write_run,
)
from therapy_saga.config_loader import (
    dump_experiment_config,
    load_experiment_config,
    resolve_output_dir,
)
from therapy_saga.errors import (
    ConfigurationError,
    DataError,
    EvaluationError,
    NumericError,
    ParameterError,
)
from therapy_saga.models.config import ExperimentConfig
from therapy_saga.models.result import RunResult
from therapy_saga.orchestrator import ExperimentOrchestrator
from therapy_saga.param_space import CANONICAL_SPACE
from therapy_saga.simulator.config import TherapyParams
from therapy_saga.simulator.engine import run_simulation
from therapy_saga.stats import summarize, wilcoxon_rank_sum

ALPHA = 0.05

# Flag destination -> dotted configuration key.
FLAG_OVERRIDES = {
    "algorithm": "algorithm",
    "seed": "run_seed",
    "budget": "evolution.evaluation_budget",
    "k": "evolution.replicates",
    "population": "evolution.population_size",
    "pool": "evolution.preselection_pool",
    "output": "output_dir",
    "parallel": "parallel_replicates",
    "objective": "objective",
}


def collect_overrides(args: argparse.Namespace) -> Mapping[str, Any]:
    """Dotted-path overrides for the flags that were given."""
    overrides: dict[str, Any] = {}
    for dest, key in FLAG_OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[key] = str(value) if isinstance(value, Path) else value
    return overrides


def log_run_summary(log: logging.Logger, result: RunResult, run_dir: Path) -> None:
    """Log the best candidate of a finished run."""
    best = result.best_record
    log.info("=" * 80)
    log.info("Run Summary: %s", result.algorithm)
    log.info("=" * 80)
    log.info("Evaluations: %d (%.1fs)", len(result.archive), result.wall_time)
    log.info(
        "Best: evaluation %d, mean fitness %.2f",
        best.evaluation_index,
        best.mean_fitness,
    )
    for warning in result.warnings:
        log.info("  Warning: %s", warning)
    log.info("Artifacts: %s", run_dir)


def log_comparison(log: logging.Logger, report: Mapping[str, Any]) -> None:
    """Log a two-sample comparison report."""
    log.info("=" * 80)
    log.info("Comparison:")
    log.info("=" * 80)
    for side in ("a", "b"):
        entry = report[side]
        stats = entry["summary"]
        log.info(
            "%s: mean %.2f, sd %.2f, min %.2f, median %.2f (n=%d)",
            entry["label"],
            stats["mean"],
            stats["sd"],
            stats["min"],
            stats["median"],
            stats["n"],
        )
    log.info(
        "Wilcoxon rank-sum p = %.4g (%s): %s",
        report["p_value"],
        report["method"],
        report["verdict"],
    )


def run_label(run_dir: Path) -> str:
    """Algorithm recorded in a run's summary, else the directory name."""
    try:
        return str(read_summary(run_dir)["algorithm"])
    except (DataError, KeyError):
        return run_dir.name


def _report_side(label: str, samples: Sequence[float]) -> dict[str, Any]:
    return {
        "label": label,
        "samples": list(samples),
        "summary": asdict(summarize(samples)),
    }


def comparison_report(
    label_a: str,
    samples_a: Sequence[float],
    label_b: str,
    samples_b: Sequence[float],
) -> dict[str, Any]:
    """Summaries of two samples and their two-sided rank-sum test."""
    test = wilcoxon_rank_sum(samples_a, samples_b)
    return {
        "a": _report_side(label_a, samples_a),
        "b": _report_side(label_b, samples_b),
        "statistic": test.statistic,
        "p_value": test.p_value,
        "method": test.method,
        "alpha": ALPHA,
        "verdict": "significant" if test.p_value <= ALPHA else "not significant",
    }


def initial_best_samples(run_dir: Path, archive: pd.DataFrame) -> Sequence[float]:
    """Samples of the best candidate in a run's initial population.

    Raises:
        DataError: If the summary lacks the population size.

    """
    summary = read_summary(run_dir)
    population_size = summary.get("population_size")
    if not isinstance(population_size, int) or population_size < 1:
        raise DataError(f"Summary of {run_dir} lacks a valid population_size")
    initial = archive[archive["evaluation_index"] < population_size]
    row = best_row(initial)
    return [float(v) for v in row[list(replicate_columns(archive))]]


async def cmd_run(cfg: ExperimentConfig, log: logging.Logger | None = None) -> int:
    """Run one experiment and write its artifacts."""
    log = log or logging.getLogger("therapy_saga")
    run_dir = resolve_output_dir(cfg)
    result = await ExperimentOrchestrator(cfg=cfg).run()
    write_run(
        run_dir,
        result,
        dump_experiment_config(cfg),
        cfg.evolution.population_size,
    )
    log_run_summary(log, result, run_dir)

    best = result.best_record
    print(
        json.dumps(
            {
                "algorithm": result.algorithm,
                "run_dir": str(run_dir),
                "evaluations": len(result.archive),
                "best_evaluation_index": best.evaluation_index,
                "best_mean_fitness": best.mean_fitness,
            },
            indent=2,
        )
    )
    return 0


def cmd_compare(
    run_a: Path,
    run_b: Path | None = None,
    initial: bool = False,
    log: logging.Logger | None = None,
) -> int:
    """Compare the best candidates of two runs, or a run against its start.

    With ``initial`` the best candidate of ``run_a`` is compared with the best
    candidate of its own initial population and ``run_b`` is ignored.
    """
    log = log or logging.getLogger("therapy_saga")
    archive_a = read_archive(run_a)
    label_a = run_label(run_a)
    samples_a = [float(v) for v in best_samples(archive_a)]
    if initial:
        label_b = f"{label_a} (initial population)"
        samples_b = initial_best_samples(run_a, archive_a)
    elif run_b is None:
        raise ParameterError("compare needs a second run or --initial")
    else:
        label_b = run_label(run_b)
        samples_b = [float(v) for v in best_samples(read_archive(run_b))]

    report = comparison_report(label_a, samples_a, label_b, samples_b)
    log_comparison(log, report)
    print(json.dumps(report, indent=2))
    return 0


def cmd_scatter(
    run_dirs: Sequence[Path], output: Path, log: logging.Logger | None = None
) -> int:
    """Write per-parameter scatter tables and per-run best traces."""
    log = log or logging.getLogger("therapy_saga")
    if not run_dirs:
        log.warning("No runs given; nothing to scatter")
        print(json.dumps({"files": []}))
        return 0

    runs = [(run_label(d), read_archive(d)) for d in run_dirs]
    output.mkdir(parents=True, exist_ok=True)
    written: list[str] = []
    for name, table in scatter_frames(runs).items():
        path = output / f"scatter_{name}.csv"
        table.to_csv(path, index=False)
        written.append(str(path))
    for run_dir, (_, archive) in zip(run_dirs, runs, strict=True):
        path = output / f"trace_{run_dir.name}.csv"
        archive_trace(archive).to_csv(path, index=False)
        written.append(str(path))

    log.info("Wrote %d plot tables to %s", len(written), output)
    print(json.dumps({"files": written}, indent=2))
    return 0


def parse_parameters(pairs: Sequence[str]) -> TherapyParams:
    """Therapy parameters from ``name=value`` pairs; unset ones take midpoints.

    Raises:
        ConfigurationError: On a malformed pair, an unknown name or an
            out-of-range value.

    """
    values = {spec.name: (spec.lower + spec.upper) / 2.0 for spec in CANONICAL_SPACE}
    for pair in pairs:
        name, sep, raw = pair.partition("=")
        if not sep or name not in values:
            raise ConfigurationError(
                f"Invalid parameter '{pair}'; "
                f"expected one of {list(PARAMETER_COLUMNS)}"
            )
        try:
            values[name] = float(raw)
        except ValueError as e:
            raise ConfigurationError(f"Invalid value for '{name}': {raw}") from e
    try:
        return TherapyParams.from_vector(
            np.array([values[name] for name in PARAMETER_COLUMNS])
        )
    except ValueError as e:
        raise ConfigurationError(f"Invalid therapy parameters: {e}") from e


def cmd_simulate(
    cfg: ExperimentConfig,
    params: TherapyParams,
    seed: int,
    output: Path,
    log: logging.Logger | None = None,
) -> int:
    """Run one simulation and write its counts and snapshots."""
    log = log or logging.getLogger("therapy_saga")
    outcome = run_simulation(cfg.simulator, params, seed)
    output.mkdir(parents=True, exist_ok=True)
    counts_path = output / f"counts_seed{seed}.csv"
    counts_frame(outcome.counts_over_time).to_csv(counts_path, index=False)
    files = [str(counts_path)]
    if outcome.snapshots:
        snapshot_path = output / f"snapshots_seed{seed}.csv"
        snapshot_frame(outcome.snapshots).to_csv(snapshot_path, index=False)
        files.append(str(snapshot_path))

    log.info(
        "Simulation seed %d: %d tumour cells (%.1fs)",
        seed,
        outcome.tumour_cell_count,
        outcome.wall_time,
    )
    print(
        json.dumps(
            {
                "seed": seed,
                "tumour_cell_count": outcome.tumour_cell_count,
                "files": files,
            },
            indent=2,
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the run, compare, scatter and simulate commands."""
    parser = argparse.ArgumentParser(
        description="Surrogate-assisted evolutionary search for tumour therapies"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="Run one optimization experiment")
    run_parser.add_argument("--config", type=Path, help="YAML experiment file")
    run_parser.add_argument(
        "--algorithm", choices=("ga", "saga-gp", "saga-mlp"), help="Algorithm"
    )
    run_parser.add_argument(
        "--objective", choices=("simulator", "synthetic"), help="Objective"
    )
    run_parser.add_argument("--seed", type=int, help="Run seed")
    run_parser.add_argument("--budget", type=int, help="Evaluation budget")
    run_parser.add_argument("--k", type=int, help="Replicates per candidate")
    run_parser.add_argument("--population", type=int, help="Population size")
    run_parser.add_argument("--pool", type=int, help="Offspring pool size M")
    run_parser.add_argument("--output", type=Path, help="Run directory")
    run_parser.add_argument("--parallel", type=int, help="Parallel replicates")

    compare_parser = commands.add_parser(
        "compare", help="Compare the best candidates of two runs"
    )
    compare_parser.add_argument("run_a", type=Path, help="First run directory")
    compare_parser.add_argument(
        "run_b", type=Path, nargs="?", help="Second run directory"
    )
    compare_parser.add_argument(
        "--initial",
        action="store_true",
        help="Compare the first run against the best of its initial population",
    )

    scatter_parser = commands.add_parser(
        "scatter", help="Export per-parameter scatter and trace tables"
    )
    scatter_parser.add_argument("runs", type=Path, nargs="*", help="Run directories")
    scatter_parser.add_argument(
        "--output", type=Path, default=Path("plots"), help="Directory for tables"
    )

    simulate_parser = commands.add_parser("simulate", help="Run one simulation")
    simulate_parser.add_argument("--config", type=Path, help="YAML experiment file")
    simulate_parser.add_argument("--seed", type=int, default=0, help="Simulation seed")
    simulate_parser.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="Physical therapy parameter; repeatable",
    )
    simulate_parser.add_argument(
        "--output", type=Path, default=Path("simulation"), help="Directory for tables"
    )
    return parser


def dispatch(args: argparse.Namespace) -> int:
    """Execute the selected command and return its exit code."""
    match args.command:
        case "run":
            cfg = load_experiment_config(args.config, collect_overrides(args))
            return asyncio.run(cmd_run(cfg))
        case "compare":
            return cmd_compare(args.run_a, args.run_b, args.initial)
        case "scatter":
            return cmd_scatter(args.runs, args.output)
        case "simulate":
            cfg = load_experiment_config(args.config)
            params = parse_parameters(args.param)
            return cmd_simulate(cfg, params, args.seed, args.output)
        case _:
            raise ParameterError(f"Unknown command: {args.command}")


def main(argv: Sequence[str] | None = None) -> None:
    """CLI entry point."""
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    log = logging.getLogger("therapy_saga")

    try:
        exit_code = dispatch(args)
    except (
        ConfigurationError,
        DataError,
        EvaluationError,
        NumericError,
        ParameterError,
        OSError,
    ) as e:
        log.error("%s", e)
        exit_code = 1
    sys.exit(exit_code)


if __name__ == "__main__":  # pragma: no cover
    main()
