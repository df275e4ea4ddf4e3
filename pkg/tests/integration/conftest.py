"""Fixtures for integration tests."""

from collections.abc import Sequence
from pathlib import Path
from typing import Protocol

import pytest

from therapy_saga.cli import main


class RunCliFn(Protocol):
    """Protocol for the CLI runner."""

    def __call__(self, *argv: str) -> int:
        """Run the CLI and return its exit code."""


class SyntheticRunFn(Protocol):
    """Protocol for a synthetic-objective run."""

    def __call__(self, name: str, algorithm: str, *extra: str) -> Path:
        """Run one experiment into ``tmp_path / name`` and return the directory."""


@pytest.fixture
def run_cli() -> RunCliFn:
    """Return a function running the CLI in-process."""

    def _run(*argv: str) -> int:
        with pytest.raises(SystemExit) as exc_info:
            main(list(argv))
        code = exc_info.value.code
        return code if isinstance(code, int) else 1

    return _run


@pytest.fixture
def synthetic_run(tmp_path: Path, run_cli: RunCliFn) -> SyntheticRunFn:
    """Return a function running a small synthetic experiment."""

    def _run(name: str, algorithm: str, *extra: str) -> Path:
        run_dir = tmp_path / name
        argv: Sequence[str] = (
            "run",
            "--objective",
            "synthetic",
            "--algorithm",
            algorithm,
            "--population",
            "6",
            "--budget",
            "14",
            "--k",
            "3",
            "--pool",
            "50",
            "--output",
            str(run_dir),
            *extra,
        )
        assert run_cli(*argv) == 0
        return run_dir

    return _run
