"""Tests for the command-line interface and its exit codes."""

from __future__ import annotations

import json
from typing import TYPE_CHECKING

import numpy as np
import pytest

from pilotkey.cli import main
from pilotkey.core.errors import IntegrationError
from pilotkey.core.models import CheckReport
from pilotkey.storage import read_trajectory_csv
from pilotkey.verification.suite import VerificationSuite


if TYPE_CHECKING:
    from pathlib import Path


def run(argv: list[str]) -> int:
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code


class TestUsage:
    def test_no_command(self):
        assert run([]) == 0

    def test_unknown_flag(self):
        assert run(["session", "--nonsense"]) == 64

    def test_bad_choice(self):
        assert run(["session", "--mode", "magic"]) == 64

    def test_missing_config_file(self, tmp_path: Path):
        assert run(["--config", str(tmp_path / "none.json"), "session"]) == 64

    def test_intercept_outside_oracle_mode(self):
        assert run(["session", "--pairs", "100", "--intercept-fraction", "0.2"]) == 64


class TestTrajectories:
    def _run(self, out: Path, pairs: int = 1) -> int:
        return run(
            [
                "--output",
                str(out),
                "trajectories",
                "--pairs",
                str(pairs),
                "--seed",
                "3",
                "--t-end",
                "10",
                "--dt",
                "0.01",
            ]
        )

    def test_paired_files(self, temp_output_dir: Path):
        assert self._run(temp_output_dir) == 0
        finals = {}
        for s in (1, -1):
            header, rows = read_trajectory_csv(temp_output_dir / f"traj_0000_s{s:+d}.csv")
            assert header["s"] == s
            finals[s] = (header, rows[-1])
        (h_plus, plus), (h_minus, minus) = finals[1], finals[-1]
        assert (h_plus["z10"], h_plus["z20"]) == (h_minus["z10"], h_minus["z20"])
        for s, (header, final) in finals.items():
            u0 = header["z10"] - s * 2.0 * header["z20"]
            assert np.sign(final[1]) == np.sign(u0)
            assert np.sign(final[2]) == -s * np.sign(u0)

    def test_no_pairs(self, temp_output_dir: Path):
        assert self._run(temp_output_dir, pairs=0) == 0
        assert list(temp_output_dir.iterdir()) == []

    def test_deterministic(self, tmp_path: Path):
        assert self._run(tmp_path / "a") == 0
        assert self._run(tmp_path / "b") == 0
        for name in ("traj_0000_s+1.csv", "traj_0000_s-1.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_failed_pair_is_skipped(self, temp_output_dir: Path, mocker):
        mocker.patch(
            "pilotkey.orchestrator.pipeline.integrate",
            side_effect=IntegrationError("diverged", step_index=4),
        )
        assert self._run(temp_output_dir, pairs=2) == 0
        assert list(temp_output_dir.iterdir()) == []


class TestSession:
    def test_honest(self, capsys: pytest.CaptureFixture[str]):
        assert run(["session", "--pairs", "2000", "--seed", "4"]) == 0
        records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
        summary = records[-1]
        assert summary["record"] == "summary"
        assert summary["alice_key"] == summary["bob_key"]
        assert records[0]["config"]["master_seed"] == 4

    def test_transcript_file(self, temp_output_dir: Path):
        out = temp_output_dir / "session.jsonl"
        code = run(["--output", str(out), "session", "--pairs", "500", "--reveal-hidden"])
        assert code == 0
        first_round = json.loads(out.read_text().splitlines()[1])
        assert "z20" in first_round

    def test_anticorrelation_abort(self):
        assert run(["session", "--pairs", "2000", "--inject-violation"]) == 10

    def test_bell_abort(self):
        argv = [
            "session",
            "--pairs",
            "10000",
            "--mode",
            "quantum_oracle",
            "--intercept-fraction",
            "1.0",
            "--workers",
            "2",
        ]
        assert run(argv) == 11

    def test_integration_failure(self, mocker):
        mocker.patch(
            "pilotkey.protocol.rounds.integrate_batch",
            side_effect=IntegrationError("non-finite position", step_index=12),
        )
        assert run(["session", "--pairs", "200", "--mode", "full_ode"]) == 20


class TestOtherCommands:
    def test_attack_baseline(self, temp_output_dir: Path):
        out = temp_output_dir / "attack.json"
        code = run(
            ["--output", str(out), "attack", "--variant", "baseline", "--pairs", "2000"]
        )
        assert code == 0
        report = json.loads(out.read_text())
        assert report["eve_accuracy"] == 1.0
        assert report["protocol_variant"] == "baseline"

    def test_attack_s_flip(self, capsys: pytest.CaptureFixture[str]):
        assert run(["attack", "--pairs", "10000", "--seed", "2"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert abs(report["eve_accuracy"] - 0.5) < 0.04

    def test_chsh(self, capsys: pytest.CaptureFixture[str]):
        assert run(["chsh", "--pairs", "20000", "--seed", "1"]) == 0
        estimate = json.loads(capsys.readouterr().out)
        assert abs(estimate["value"]) == pytest.approx(2 * np.sqrt(2), abs=0.1)

    def test_verify_failure_exit(self, mocker, capsys: pytest.CaptureFixture[str]):
        failed = CheckReport(
            check_name="continuity",
            max_abs_error=1.0,
            max_rel_error=1.0,
            passed=False,
            tolerance=1e-3,
        )
        mocker.patch.object(VerificationSuite, "run_all", return_value=[failed])
        assert run(["verify", "--seed", "5"]) == 1
        config, check = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
        assert config["record"] == "config"
        assert config["config"]["master_seed"] == 5
        assert check["record"] == "check"
        assert check["check_name"] == "continuity"

    @pytest.mark.slow
    def test_verify_passes(self, tmp_path: Path):
        config = tmp_path / "light.json"
        config.write_text(
            json.dumps(
                {
                    "verification": {
                        "n_points": 41,
                        "equivariance_samples": 50_000,
                        "equivariance_bins": 20,
                        "order_pairs": 4,
                    }
                }
            )
        )
        assert run(["--config", str(config), "verify", "--seed", "3"]) == 0
