"""Command-line interface for pilotkey."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any, NoReturn

from pilotkey.config.settings import load_config
from pilotkey.console.logger import ExperimentConsole
from pilotkey.core.errors import ConfigurationError, IntegrationError
from pilotkey.core.models import EveStrategy
from pilotkey.core.types import AbortReason, OutcomeMode, ProtocolVariant
from pilotkey.orchestrator.pipeline import SessionPipeline, run_attack, run_trajectories
from pilotkey.protocol.chsh import chsh_estimate, simulate_bell_rounds
from pilotkey.storage.writers import (
    session_records,
    trajectory_filename,
    write_json,
    write_jsonl,
    write_trajectory_csv,
)
from pilotkey.verification.suite import VerificationSuite


if TYPE_CHECKING:
    from collections.abc import Sequence

    from pilotkey.config.settings import RunConfig

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ANTICORRELATION = 10
EXIT_BELL = 11
EXIT_INTEGRATION = 20
EXIT_USAGE = 64
EXIT_INTERRUPTED = 130

ABORT_EXIT_CODES = {
    AbortReason.NONE: EXIT_OK,
    AbortReason.ANTICORRELATION_VIOLATION: EXIT_ANTICORRELATION,
    AbortReason.BELL_VIOLATION: EXIT_BELL,
}

console = ExperimentConsole()


class _ArgumentParser(argparse.ArgumentParser):
    """Exits with the usage code on bad arguments."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, output: Path | None) -> None:
    """Write machine-readable output to a file, or to stdout."""
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8")


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    """Flag values that were actually given, shaped like a RunConfig document."""
    top = {
        "n_pairs": getattr(args, "pairs", None),
        "master_seed": getattr(args, "seed", None),
        "mode": getattr(args, "mode", None),
        "output_path": args.output,
    }
    integrator = {"t_end": getattr(args, "t_end", None), "dt": getattr(args, "dt", None)}
    protocol = {
        "test_fraction": getattr(args, "test_fraction", None),
        "bell_tolerance": getattr(args, "bell_tolerance", None),
        "intercept_fraction": getattr(args, "intercept_fraction", None),
        "enforce_slit": getattr(args, "enforce_slit", None),
        "workers": getattr(args, "workers", None),
    }
    overrides: dict[str, Any] = {k: v for k, v in top.items() if v is not None}
    for name, section in (("integrator", integrator), ("protocol", protocol)):
        given = {k: v for k, v in section.items() if v is not None}
        if given:
            overrides[name] = given
    return overrides


def cmd_trajectories(config: RunConfig, s_choice: str) -> int:
    """Integrate sampled pairs and write one CSV per pair and s."""
    s_values = {"+1": (1,), "-1": (-1,), "both": (1, -1)}[s_choice]
    out_dir = config.output_path or Path("trajectories")
    console.print_header("trajectories", config.master_seed, config.n_pairs)

    with console.progress() as progress:
        task = progress.add_task("Integrating pairs...", total=config.n_pairs)
        run = run_trajectories(
            config, s_values, on_pair=lambda _: progress.update(task, advance=1)
        )

    echo = config.echo()
    for index, by_s in run.pairs.items():
        for s, traj in by_s.items():
            write_trajectory_csv(out_dir / trajectory_filename(index, s), traj, echo)
    console.print_trajectory_run(run)
    console.print_success(f"{len(run.pairs)} pairs written", str(out_dir))
    return EXIT_OK


def cmd_session(config: RunConfig, reveal_hidden: bool, inject_violation: bool) -> int:
    """Run one key-distribution session and write its transcript."""
    console.print_header("session", config.master_seed, config.n_pairs)
    transcript = SessionPipeline(config).run(inject_violation=inject_violation)
    records = session_records(transcript, config.echo(), reveal_hidden)
    if config.output_path is not None:
        write_jsonl(config.output_path, records)
    else:
        _emit("".join(json.dumps(r) + "\n" for r in records), None)
    console.print_transcript_summary(transcript)
    return ABORT_EXIT_CODES[transcript.abort_reason]


def cmd_verify(config: RunConfig) -> int:
    """Run the numerical oracles; fails if any check fails."""
    console.print_header("verify", config.master_seed)
    reports = VerificationSuite.from_config(config).run_all()
    records = [
        {"record": "config", "config": config.echo()},
        *({"record": "check", **r.model_dump(mode="json")} for r in reports),
    ]
    if config.output_path is not None:
        write_jsonl(config.output_path, records)
    else:
        _emit("".join(json.dumps(r) + "\n" for r in records), None)
    console.print_check_reports(reports)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_attack(config: RunConfig, variant: ProtocolVariant, knows_s: bool, use_z10: bool) -> int:
    """Run a session and report how well a position-aware eavesdropper guesses the key."""
    console.print_header(f"attack ({variant.value})", config.master_seed, config.n_pairs)
    strategy = EveStrategy(use_z10=use_z10, seed=config.master_seed)
    report = run_attack(config, variant, knows_s, strategy)
    data = {"config": config.echo(), **report.model_dump(mode="json")}
    if config.output_path is not None:
        write_json(config.output_path, data)
    else:
        _emit(json.dumps(data, indent=2) + "\n", None)
    console.print_attack_report(report)
    return EXIT_OK


def cmd_chsh(config: RunConfig) -> int:
    """Estimate the CHSH value from oracle-mode rounds with orthogonal settings."""
    console.print_header("chsh", config.master_seed, config.n_pairs)
    protocol = config.protocol
    rounds = simulate_bell_rounds(
        config.n_pairs,
        config.params,
        config.master_seed,
        protocol.chsh_angles,
        protocol.intercept_fraction,
        protocol.workers,
    )
    estimate = chsh_estimate(rounds, protocol.chsh_angles)
    data = {"config": config.echo(), **estimate.model_dump(mode="json")}
    if config.output_path is not None:
        write_json(config.output_path, data)
    else:
        _emit(json.dumps(data, indent=2) + "\n", None)
    console.print_chsh_estimate(estimate)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="pilotkey",
        description="Bohmian double Stern-Gerlach simulator and key-distribution analysis",
    )
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    parser.add_argument("--output", "-o", type=Path, help="Output file (directory for CSVs)")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    traj = subparsers.add_parser("trajectories", help="Integrate pairs for s = +1 and/or -1")
    traj.add_argument("--pairs", type=int, help="Number of sampled pairs")
    traj.add_argument("--seed", type=int, help="Master seed")
    traj.add_argument("--s", dest="s_choice", choices=["+1", "-1", "both"], default="both")
    traj.add_argument("--t-end", type=float, help="Integration horizon")
    traj.add_argument("--dt", type=float, help="RK4 step")
    traj.add_argument("--enforce-slit", action="store_true", default=None)

    sess = subparsers.add_parser("session", help="Run a key-distribution session")
    sess.add_argument("--pairs", type=int, help="Number of emitted pairs")
    sess.add_argument("--seed", type=int, help="Master seed")
    sess.add_argument("--mode", choices=[m.value for m in OutcomeMode])
    sess.add_argument("--bell-tolerance", type=float)
    sess.add_argument("--test-fraction", type=float)
    sess.add_argument("--reveal-hidden", action="store_true", help="Include hidden variables")
    sess.add_argument("--inject-violation", action="store_true", help="Tamper one test round")
    sess.add_argument("--intercept-fraction", type=float)
    sess.add_argument("--enforce-slit", action="store_true", default=None)
    sess.add_argument("--workers", type=int)

    ver = subparsers.add_parser("verify", help="Run the numerical oracles")
    ver.add_argument("--seed", type=int, help="Seed for sampled checks")

    att = subparsers.add_parser("attack", help="Score a Bohmian eavesdropper")
    att.add_argument(
        "--variant",
        choices=[v.value for v in ProtocolVariant],
        default=ProtocolVariant.S_FLIP.value,
    )
    att.add_argument("--pairs", type=int)
    att.add_argument("--seed", type=int)
    att.add_argument("--knows-s", action="store_true", help="Eve reads Bob's s")
    att.add_argument("--use-z10", action="store_true", help="Guess with the exact sgn(u) law")

    chsh = subparsers.add_parser("chsh", help="Estimate the CHSH value")
    chsh.add_argument("--pairs", type=int)
    chsh.add_argument("--seed", type=int)
    chsh.add_argument("--intercept-fraction", type=float)

    return parser


def _dispatch(args: argparse.Namespace, config: RunConfig) -> int:
    if args.command == "trajectories":
        return cmd_trajectories(config, args.s_choice)
    if args.command == "session":
        return cmd_session(config, args.reveal_hidden, args.inject_violation)
    if args.command == "verify":
        return cmd_verify(config)
    if args.command == "attack":
        return cmd_attack(config, ProtocolVariant(args.variant), args.knows_s, args.use_z10)
    return cmd_chsh(config)


def main(argv: Sequence[str] | None = None) -> None:
    """Main entry point for CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        sys.exit(EXIT_OK)

    try:
        config = load_config(args.config, _overrides(args))
        console.verbose = args.verbose
        console.setup_logging(config.log_level)
        code = _dispatch(args, config)
    except KeyboardInterrupt:
        console.console.print("\n[yellow]Cancelled by user[/yellow]")
        sys.exit(EXIT_INTERRUPTED)
    except ConfigurationError as e:
        console.print_error(str(e))
        sys.exit(EXIT_USAGE)
    except IntegrationError as e:
        console.print_error(f"{e} (step {e.step_index})")
        sys.exit(EXIT_INTEGRATION)
    except Exception as e:
        console.print_error(str(e))
        sys.exit(EXIT_FAILED)
    sys.exit(code)


if __name__ == "__main__":
    main()
