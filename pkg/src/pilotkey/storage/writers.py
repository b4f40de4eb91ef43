"""Writers for trajectory CSVs, transcripts and reports.

Floats are written with ``repr`` so every value survives a round trip. Output
files are written once, after the computation that produced them has finished.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any


if TYPE_CHECKING:
    from collections.abc import Iterable

    from pilotkey.core.models import SessionTranscript, TrajectoryPair

logger = logging.getLogger(__name__)


def trajectory_filename(index: int, s: int) -> str:
    return f"traj_{index:04d}_s{s:+d}.csv"


def write_trajectory_csv(path: Path, traj: TrajectoryPair, config_echo: dict[str, Any]) -> Path:
    """One trajectory as ``t,z1,z2`` rows below a ``#`` header echoing the run."""
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "config": config_echo,
        "s": traj.settings.s,
        "z10": traj.initial.z10,
        "z20": traj.initial.z20,
    }
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write(f"# {json.dumps(header, sort_keys=True)}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t", "z1", "z2"])
        for row in zip(traj.times.tolist(), traj.z1.tolist(), traj.z2.tolist(), strict=True):
            writer.writerow([repr(v) for v in row])
    logger.debug("Wrote %s (%d samples)", path, len(traj.times))
    return path


def read_trajectory_csv(path: Path) -> tuple[dict[str, Any], list[tuple[float, float, float]]]:
    """Header and rows of a file produced by :func:`write_trajectory_csv`."""
    with path.open(encoding="utf-8", newline="") as f:
        header = json.loads(f.readline().removeprefix("# "))
        reader = csv.reader(f)
        next(reader)
        rows = [(float(t), float(z1), float(z2)) for t, z1, z2 in reader]
    return header, rows


def write_json(path: Path, data: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return path


def write_jsonl(path: Path, records: Iterable[dict[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record) + "\n")
    return path


def session_records(
    transcript: SessionTranscript,
    config_echo: dict[str, Any] | None = None,
    reveal_hidden: bool = False,
) -> list[dict[str, Any]]:
    """Config echo, one record per round, then the session summary.

    Rounds carry only what crossed the classical channel unless ``reveal_hidden``.
    """
    records: list[dict[str, Any]] = []
    if config_echo is not None:
        records.append({"record": "config", "config": config_echo})
    for r in transcript.rounds:
        body = r.full_record() if reveal_hidden else r.public_record()
        records.append({"record": "round", **body})
    records.append({"record": "summary", **transcript.summary()})
    return records
