"""Console output with Rich."""

from pilotkey.console.logger import ExperimentConsole


__all__ = ["ExperimentConsole"]
