"""pilotkey - Bohmian double Stern-Gerlach simulator and key-distribution analysis.

This package provides:
- Closed-form wavefunction, density and currents for an entangled spin pair
- Guidance-law trajectories and their measurement outcomes
- Numerical oracles for the closed forms and the integrator
- A key-distribution protocol in which Bob flips his field at random
- An eavesdropper who knows every hidden position
"""

from __future__ import annotations

from pilotkey.config.settings import RunConfig, load_config
from pilotkey.core.models import (
    AttackReport,
    PhysParams,
    ProtocolRound,
    SessionTranscript,
    TrajectoryPair,
)
from pilotkey.core.types import OutcomeMode, ProtocolVariant
from pilotkey.orchestrator.pipeline import SessionPipeline, run_attack, run_trajectories


__version__ = "0.1.0"

__all__ = [
    "AttackReport",
    "OutcomeMode",
    "PhysParams",
    "ProtocolRound",
    "ProtocolVariant",
    "RunConfig",
    "SessionPipeline",
    "SessionTranscript",
    "TrajectoryPair",
    "load_config",
    "run_attack",
    "run_trajectories",
]
