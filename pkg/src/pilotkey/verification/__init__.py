"""Verification module - numerical oracles for physics and integrator."""

from __future__ import annotations

from pilotkey.verification.checks import (
    check_continuity,
    check_current_consistency,
    check_density_oracle,
    check_equivariance,
    check_integrator_order,
    check_normalization,
    check_wavefunction_current,
    normalization,
)
from pilotkey.verification.suite import Check, VerificationSuite


__all__ = [
    "Check",
    "VerificationSuite",
    "check_continuity",
    "check_current_consistency",
    "check_density_oracle",
    "check_equivariance",
    "check_integrator_order",
    "check_normalization",
    "check_wavefunction_current",
    "normalization",
]
