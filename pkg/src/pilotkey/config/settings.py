"""Run configuration.

Values are resolved with the precedence CLI flags > JSON config file > environment
(``PILOTKEY_*``, nested with ``__``) > defaults.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from pilotkey.core.errors import ConfigurationError
from pilotkey.core.models import ChshAngles, PhysParams
from pilotkey.core.types import ALIGNED, ORTHOGONAL, OutcomeMode


logger = logging.getLogger(__name__)


class IntegratorSettings(BaseModel):
    """Trajectory integration configuration."""

    t_end: float | None = Field(default=None, gt=0.0)
    dt: float = Field(default=1e-3, gt=0.0)
    decay: float = Field(default=1e-3, gt=0.0, lt=1.0)
    max_samples: int = Field(default=4096, ge=2)
    dead_zone: float = Field(default=1e-6, ge=0.0)


class ProtocolSettings(BaseModel):
    """Key-distribution session configuration."""

    test_fraction: float = Field(default=0.5, gt=0.0, lt=1.0)
    bell_tolerance: float = Field(default=0.2, gt=0.0)
    chsh_angles: ChshAngles = Field(default_factory=ChshAngles)
    enforce_slit: bool = False
    intercept_fraction: float = Field(default=0.0, ge=0.0, le=1.0)
    fixed_s: int | None = None
    fixed_delta: float | None = None
    bob_seed: int | None = None
    workers: int = Field(default=1, ge=1)

    @field_validator("fixed_s")
    @classmethod
    def _valid_s(cls, v: int | None) -> int | None:
        if v is not None and v not in (1, -1):
            msg = f"fixed_s must be +1 or -1, got {v}"
            raise ValueError(msg)
        return v

    @field_validator("fixed_delta")
    @classmethod
    def _valid_delta(cls, v: float | None) -> float | None:
        if v is not None and v not in (ALIGNED, ORTHOGONAL):
            msg = f"fixed_delta must be 0 or pi/2, got {v}"
            raise ValueError(msg)
        return v


class VerificationSettings(BaseModel):
    """Numerical oracle configuration."""

    n_points: int = Field(default=101, ge=3)
    times: list[float] = Field(default_factory=lambda: [0.0, 0.5, 2.0])
    continuity_step: float = Field(default=1e-3, gt=0.0)
    equivariance_samples: int = Field(default=100_000, ge=1)
    equivariance_bins: int = Field(default=50, ge=2)
    t_probe: float = Field(default=0.2, ge=0.0)
    normalization_times: list[float] = Field(default_factory=lambda: [0.0, 1.0, 5.0])
    fuzz_points: int = Field(default=10_000, ge=1)
    order_pairs: int = Field(default=10, ge=1)


class RunConfig(BaseSettings):
    """Top-level configuration of every subcommand.

    Settings are loaded from init kwargs, ``PILOTKEY_*`` environment variables or a
    ``.env`` file.
    """

    model_config = SettingsConfigDict(
        env_prefix="PILOTKEY_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        env_nested_delimiter="__",
    )

    # Physics
    params: PhysParams = Field(default_factory=PhysParams)

    # Reproducibility
    master_seed: int = 0
    n_pairs: int = Field(default=10_000, ge=0)
    mode: OutcomeMode = OutcomeMode.SIGN_LAW

    integrator: IntegratorSettings = Field(default_factory=IntegratorSettings)
    protocol: ProtocolSettings = Field(default_factory=ProtocolSettings)
    verification: VerificationSettings = Field(default_factory=VerificationSettings)

    output_path: Path | None = None

    # Logging
    log_level: str = "INFO"

    def echo(self) -> dict[str, Any]:
        """JSON-serialisable snapshot; ``load_config(overrides=echo())`` reproduces the run."""
        data = self.model_dump(mode="json")
        data.pop("output_path", None)
        return data


def _deep_merge(base: dict[str, Any], update: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path: Path | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Build a RunConfig from an optional JSON file plus flag overrides.

    Raises:
        ConfigurationError: If the file is unreadable, not JSON, or fails validation.
    """
    document: dict[str, Any] = {}
    if path is not None:
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            msg = f"Cannot read config {path}: {e}"
            raise ConfigurationError(msg) from e
        if not isinstance(loaded, dict):
            msg = f"Config {path} must hold a JSON object"
            raise ConfigurationError(msg)
        document = loaded
        logger.debug("Loaded config file %s", path)
    merged = _deep_merge(document, overrides or {})
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        msg = f"Invalid configuration: {e}"
        raise ConfigurationError(msg) from e
