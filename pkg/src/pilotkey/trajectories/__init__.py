"""Equilibrium sampling, trajectory integration and outcome readout."""

from __future__ import annotations

from pilotkey.trajectories.integrator import (
    BatchResult,
    default_t_end,
    integrate,
    integrate_batch,
    rk4_step,
)
from pilotkey.trajectories.outcomes import (
    outcome_exact,
    outcome_from_final,
    outcome_measured,
    outcome_predicted,
    outcomes_from_final,
)
from pilotkey.trajectories.sampling import sample_in_slit, sample_initial, sample_initial_batch


__all__ = [
    "BatchResult",
    "default_t_end",
    "integrate",
    "integrate_batch",
    "outcome_exact",
    "outcome_from_final",
    "outcome_measured",
    "outcome_predicted",
    "outcomes_from_final",
    "rk4_step",
    "sample_in_slit",
    "sample_initial",
    "sample_initial_batch",
]
