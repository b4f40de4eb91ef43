"""Configuration module."""

from __future__ import annotations

from pilotkey.config.settings import (
    IntegratorSettings,
    ProtocolSettings,
    RunConfig,
    VerificationSettings,
    load_config,
)


__all__ = [
    "IntegratorSettings",
    "ProtocolSettings",
    "RunConfig",
    "VerificationSettings",
    "load_config",
]
