"""Fixtures for the acceptance suites (figure reproductions and property checks)."""

import logging
import os
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def results_dir(tmp_path_factory) -> Path:
    """Where the suites write their CSV and JSON; EQRF_RESULTS keeps them after the run."""
    keep = os.environ.get("EQRF_RESULTS")
    if keep:
        path = Path(keep)
        path.mkdir(parents=True, exist_ok=True)
        return path
    return tmp_path_factory.mktemp("results")


@pytest.fixture(autouse=True)
def suite_logging(caplog):
    caplog.set_level(logging.INFO, logger="eqrf")
