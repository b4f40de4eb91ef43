"""Pytest configuration and shared fixtures."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import pytest

from pilotkey.config.settings import load_config
from pilotkey.core.models import PhysParams


if TYPE_CHECKING:
    from collections.abc import Generator

    from pilotkey.config.settings import RunConfig


@pytest.fixture
def project_root() -> Path:
    """Get project root directory."""
    return Path(__file__).parent.parent


@pytest.fixture
def natural_params() -> PhysParams:
    """Natural units with a weak field, for closed-form checks."""
    return PhysParams(field_gradient=1.0)


@pytest.fixture
def strong_params() -> PhysParams:
    """Natural units, kick 10, K = 2, d = 1: the protocol regime."""
    return PhysParams()


@pytest.fixture
def temp_output_dir(tmp_path: Path) -> Generator[Path, None, None]:
    """Create temporary output directory."""
    output_dir = tmp_path / "output"
    output_dir.mkdir()
    yield output_dir


@pytest.fixture
def small_config() -> RunConfig:
    """Quick sign-law run with light verification settings."""
    return load_config(
        overrides={
            "n_pairs": 2000,
            "master_seed": 7,
            "verification": {
                "n_points": 41,
                "equivariance_samples": 20_000,
                "equivariance_bins": 20,
                "fuzz_points": 500,
                "order_pairs": 4,
            },
        }
    )
