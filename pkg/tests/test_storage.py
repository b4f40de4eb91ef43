"""Tests for output writers."""

from __future__ import annotations

import json
from typing import TYPE_CHECKING

import pytest

from pilotkey.core.models import InitialPositions, PhysParams, RoundSettings, TrajectoryPair
from pilotkey.orchestrator.pipeline import SessionPipeline
from pilotkey.storage import (
    read_trajectory_csv,
    session_records,
    trajectory_filename,
    write_json,
    write_jsonl,
    write_trajectory_csv,
)
from pilotkey.trajectories import integrate


if TYPE_CHECKING:
    from pathlib import Path

    from pilotkey.config.settings import RunConfig


@pytest.fixture
def trajectory(strong_params: PhysParams) -> TrajectoryPair:
    initial = InitialPositions(z10=0.123456789012345, z20=-0.4)
    return integrate(initial, RoundSettings(s=-1), strong_params, t_end=0.5, dt=1e-2)


class TestTrajectoryCsv:
    def test_file_names(self):
        assert trajectory_filename(7, 1) == "traj_0007_s+1.csv"
        assert trajectory_filename(12, -1) == "traj_0012_s-1.csv"

    def test_round_trip_precision(self, trajectory: TrajectoryPair, temp_output_dir: Path):
        path = write_trajectory_csv(temp_output_dir / "t.csv", trajectory, {"master_seed": 1})
        header, rows = read_trajectory_csv(path)
        assert header["config"] == {"master_seed": 1}
        assert header["s"] == -1
        assert len(rows) == len(trajectory.times)
        assert rows[0][1] == trajectory.initial.z10
        assert rows[-1] == (trajectory.times[-1], trajectory.z1[-1], trajectory.z2[-1])

    def test_layout(self, trajectory: TrajectoryPair, temp_output_dir: Path):
        path = write_trajectory_csv(temp_output_dir / "t.csv", trajectory, {})
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# ")
        assert lines[1] == "t,z1,z2"

    def test_byte_identical(self, trajectory: TrajectoryPair, temp_output_dir: Path):
        a = write_trajectory_csv(temp_output_dir / "a.csv", trajectory, {"x": 1})
        b = write_trajectory_csv(temp_output_dir / "b.csv", trajectory, {"x": 1})
        assert a.read_bytes() == b.read_bytes()


class TestRecords:
    def test_json_writers(self, temp_output_dir: Path):
        write_jsonl(temp_output_dir / "nested" / "r.jsonl", [{"a": 1}, {"a": 2}])
        lines = (temp_output_dir / "nested" / "r.jsonl").read_text().splitlines()
        assert [json.loads(line) for line in lines] == [{"a": 1}, {"a": 2}]
        write_json(temp_output_dir / "r.json", {"b": 0.1})
        assert json.loads((temp_output_dir / "r.json").read_text()) == {"b": 0.1}

    def test_public_transcript(self, small_config: RunConfig):
        transcript = SessionPipeline(small_config).run()
        records = session_records(transcript, small_config.echo())
        assert records[0]["record"] == "config"
        assert records[-1]["record"] == "summary"
        assert len(records) == len(transcript.rounds) + 2
        rounds = [r for r in records if r["record"] == "round"]
        assert all("z20" not in r and "s" not in r for r in rounds)
        assert records[-1]["alice_key"] == transcript.alice_key

    def test_hidden_transcript(self, small_config: RunConfig):
        transcript = SessionPipeline(small_config).run()
        records = session_records(transcript, reveal_hidden=True)
        assert records[0]["record"] == "round"
        assert {"z10", "z20", "s", "w_a", "w_b"} <= set(records[0])
        json.dumps(records)
