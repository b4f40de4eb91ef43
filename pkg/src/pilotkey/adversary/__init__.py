"""Adversary module - hidden-variable eavesdropper analysis."""

from __future__ import annotations

from pilotkey.adversary.eve import eve_guess_baseline, eve_guess_protocol
from pilotkey.adversary.report import attack_report, key_correlation


__all__ = [
    "attack_report",
    "eve_guess_baseline",
    "eve_guess_protocol",
    "key_correlation",
]
