"""Storage layer for experiment outputs."""

from pilotkey.storage.writers import (
    read_trajectory_csv,
    session_records,
    trajectory_filename,
    write_json,
    write_jsonl,
    write_trajectory_csv,
)


__all__ = [
    "read_trajectory_csv",
    "session_records",
    "trajectory_filename",
    "write_json",
    "write_jsonl",
    "write_trajectory_csv",
]
