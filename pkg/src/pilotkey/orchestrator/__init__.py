"""Orchestrator module."""

from __future__ import annotations

from pilotkey.orchestrator.pipeline import (
    PairFailure,
    SessionPipeline,
    TrajectoryRun,
    run_attack,
    run_trajectories,
)


__all__ = ["PairFailure", "SessionPipeline", "TrajectoryRun", "run_attack", "run_trajectories"]
