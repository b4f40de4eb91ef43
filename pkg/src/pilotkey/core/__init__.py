"""Core module - domain models, errors and shared types."""

from __future__ import annotations

from pilotkey.core.errors import (
    AbortedSessionError,
    AmbiguousOutcomeError,
    ConfigurationError,
    DegenerateInputError,
    InsufficientKeyError,
    InsufficientRoundsError,
    InsufficientStatisticsError,
    IntegrationError,
    PilotKeyError,
)
from pilotkey.core.models import (
    AttackReport,
    CheckReport,
    ChshAngles,
    ChshEstimate,
    EveKnowledge,
    EveStrategy,
    GridSpec,
    InitialPositions,
    Outcome,
    PhysParams,
    ProtocolRound,
    RoundSettings,
    SessionTranscript,
    SpinorAmplitudes,
    TrajectoryPair,
)
from pilotkey.core.types import ALIGNED, ORTHOGONAL, AbortReason, OutcomeMode, ProtocolVariant


__all__ = [
    # Types
    "ALIGNED",
    "ORTHOGONAL",
    "AbortReason",
    # Errors
    "AbortedSessionError",
    "AmbiguousOutcomeError",
    # Models
    "AttackReport",
    "CheckReport",
    "ChshAngles",
    "ChshEstimate",
    "ConfigurationError",
    "DegenerateInputError",
    "EveKnowledge",
    "EveStrategy",
    "GridSpec",
    "InitialPositions",
    "InsufficientKeyError",
    "InsufficientRoundsError",
    "InsufficientStatisticsError",
    "IntegrationError",
    "Outcome",
    "OutcomeMode",
    "PhysParams",
    "PilotKeyError",
    "ProtocolRound",
    "ProtocolVariant",
    "RoundSettings",
    "SessionTranscript",
    "SpinorAmplitudes",
    "TrajectoryPair",
]
