"""Load experiment configurations from YAML files and command-line overrides."""

import os
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from therapy_saga.errors import ConfigurationError
from therapy_saga.models.config import ExperimentConfig

OUTPUT_ROOT_ENV = "THERAPY_SAGA_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = Path("runs")


def read_config_file(path: Path) -> dict[str, Any]:
    """Read a YAML mapping; an empty file is an empty mapping.

    Raises:
        ConfigurationError: If the file is missing, not YAML or not a mapping.

    """
    if not path.exists():
        raise ConfigurationError(f"Config file not found: {path}")
    try:
        with path.open() as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Invalid YAML in {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file {path} must contain a mapping")
    return data


def apply_overrides(
    data: Mapping[str, Any], overrides: Mapping[str, Any]
) -> dict[str, Any]:
    """Return a copy of ``data`` with dotted-path overrides applied.

    ``{"evolution.replicates": 3}`` sets ``data["evolution"]["replicates"]``.
    """
    merged: dict[str, Any] = dict(data)
    for dotted, value in overrides.items():
        *parents, leaf = dotted.split(".")
        node = merged
        for key in parents:
            child = node.get(key)
            node[key] = dict(child) if isinstance(child, Mapping) else {}
            node = node[key]
        node[leaf] = value
    return merged


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or "<root>"
    return f"Invalid configuration at '{key}': {first['msg']}"


def load_experiment_config(
    path: Path | None = None, overrides: Mapping[str, Any] | None = None
) -> ExperimentConfig:
    """Load and validate an experiment configuration.

    Args:
        path: Optional YAML file; without one the defaults apply
        overrides: Dotted-path values that take precedence over the file

    Returns:
        The validated configuration

    Raises:
        ConfigurationError: If the file is unreadable or a value is invalid;
            the message names the offending key

    """
    data = read_config_file(path) if path is not None else {}
    data = apply_overrides(data, overrides or {})
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(_describe(e)) from e


def dump_experiment_config(cfg: ExperimentConfig) -> str:
    """Fully defaulted configuration as YAML, in field order."""
    return yaml.safe_dump(cfg.model_dump(mode="json"), sort_keys=False)


def resolve_output_dir(cfg: ExperimentConfig) -> Path:
    """Run directory: the configured one, else a seed-named folder under the root.

    The root comes from ``THERAPY_SAGA_OUTPUT_ROOT`` and defaults to ``runs``.
    """
    if cfg.output_dir is not None:
        return cfg.output_dir
    root = Path(os.environ.get(OUTPUT_ROOT_ENV, DEFAULT_OUTPUT_ROOT))
    return root / f"{cfg.algorithm}-seed{cfg.run_seed}"
