"""Exception hierarchy.

Protocol aborts are data on the transcript, not exceptions. The classes below
signal broken preconditions or numerical failures.
"""

from __future__ import annotations


class PilotKeyError(Exception):
    """Base class for all pilotkey errors."""


class ConfigurationError(PilotKeyError):
    """Parameters or settings outside the supported regime."""


class IntegrationError(PilotKeyError):
    """The trajectory integrator produced a non-finite state."""

    def __init__(self, message: str, step_index: int) -> None:
        super().__init__(message)
        self.step_index = step_index


class AmbiguousOutcomeError(PilotKeyError):
    """A final position lies inside the sign-readout dead zone."""


class DegenerateInputError(PilotKeyError):
    """Input sits exactly on a symmetry axis where a sign law is undefined."""


class InsufficientStatisticsError(PilotKeyError):
    """Too few rounds to estimate a correlation term."""


class InsufficientRoundsError(PilotKeyError):
    """Sifting left no rounds for the key."""


class AbortedSessionError(PilotKeyError):
    """A key was requested from an aborted session."""


class InsufficientKeyError(PilotKeyError):
    """The key is too short for an attack report."""
