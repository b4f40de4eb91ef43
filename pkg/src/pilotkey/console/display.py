"""Display components for console output."""

from __future__ import annotations

from typing import TYPE_CHECKING

from rich.table import Table
from rich.tree import Tree


if TYPE_CHECKING:
    from rich.console import Console

    from pilotkey.core.models import (
        AttackReport,
        CheckReport,
        ChshEstimate,
        SessionTranscript,
    )
    from pilotkey.orchestrator.pipeline import TrajectoryRun


def print_check_reports(console: Console, reports: list[CheckReport]) -> None:
    """Print verification results."""
    table = Table(title="Verification", border_style="blue")
    table.add_column("Check", style="bold")
    table.add_column("Max abs", justify="right")
    table.add_column("Max rel", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Result", justify="center")
    for report in reports:
        status = "[green]pass[/green]" if report.passed else "[red]FAIL[/red]"
        table.add_row(
            report.check_name,
            f"{report.max_abs_error:.3e}",
            f"{report.max_rel_error:.3e}",
            f"{report.tolerance:.1e}",
            status,
        )
    console.print(table)


def print_transcript_summary(console: Console, transcript: SessionTranscript) -> None:
    """Print session statistics."""
    console.print()
    summary = transcript.summary()
    table = Table(title="Session Summary", border_style="blue")
    table.add_column("Metric", style="bold")
    table.add_column("Value", justify="right")
    table.add_row("Rounds", str(summary["n_rounds"]))
    table.add_row("Filtered by Bob", str(summary["n_filtered"]))
    table.add_row("Test rounds", str(summary["n_test"]))
    table.add_row("Key length", str(summary["key_length"]))
    if transcript.aborted:
        table.add_row("Status", f"[red]aborted ({transcript.abort_reason.value})[/red]")
    else:
        match = transcript.alice_key == transcript.bob_key
        table.add_row("Keys agree", "[green]yes[/green]" if match else "[red]no[/red]")
    for s, est in sorted(transcript.chsh_estimates.items()):
        table.add_row(f"  CHSH (s={s:+d})", f"{est.value:.4f} ± {est.std_error:.4f}")
    console.print(table)


def print_chsh_estimate(console: Console, estimate: ChshEstimate) -> None:
    tree = Tree(f"[bold]S = {estimate.value:.4f}[/bold] [dim]± {estimate.std_error:.4f}[/dim]")
    for label, e in estimate.correlations.items():
        tree.add(f"[cyan]E({label})[/cyan] = {e:+.4f} [dim](n={estimate.counts[label]})[/dim]")
    console.print(tree)


def print_attack_report(console: Console, report: AttackReport) -> None:
    """Print Eve's accuracy with its confidence interval."""
    console.print()
    table = Table(title="Eavesdropper", border_style="blue")
    table.add_column("Metric", style="bold")
    table.add_column("Value", justify="right")
    table.add_row("Protocol", report.protocol_variant.value)
    table.add_row("Eve knows s", "yes" if report.knows_s else "no")
    table.add_row("Key bits", str(report.n_key_bits))
    color = "red" if report.eve_accuracy > 0.75 else "green"
    table.add_row("Accuracy", f"[{color}]{report.eve_accuracy:.4f}[/{color}]")
    low, high = report.binomial_ci
    table.add_row(f"{report.confidence_level:.0%} CI", f"[{low:.4f}, {high:.4f}]")
    table.add_row("Correlation", f"{report.key_correlation:+.4f}")
    console.print(table)


def print_trajectory_run(console: Console, run: TrajectoryRun) -> None:
    """Print final sides of each integrated pair."""
    if not run.pairs:
        console.print("  [yellow]⚠[/yellow] No trajectories integrated")
        return
    tree = Tree("[bold]Final positions[/bold]")
    for index, by_s in list(run.pairs.items())[:10]:
        branch = tree.add(f"[dim]pair {index:04d}[/dim]")
        for s, traj in sorted(by_s.items(), reverse=True):
            branch.add(f"s={s:+d}: z1={traj.z1[-1]:+.3f} z2={traj.z2[-1]:+.3f}")
    if len(run.pairs) > 10:
        tree.add(f"[dim]... and {len(run.pairs) - 10} more[/dim]")
    for failure in run.failures:
        tree.add(f"[red]✗[/red] pair {failure.index:04d} s={failure.s:+d}: {failure.message}")
    console.print(tree)
