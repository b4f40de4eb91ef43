"""Rich console for experiment progress and results.

Everything here goes to stderr so CSV and JSON written to stdout stay clean.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from typing import TYPE_CHECKING

from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)
from rich.text import Text

from pilotkey.console.display import (
    print_attack_report,
    print_check_reports,
    print_chsh_estimate,
    print_trajectory_run,
    print_transcript_summary,
)


if TYPE_CHECKING:
    from collections.abc import Iterator

    from pilotkey.core.models import (
        AttackReport,
        CheckReport,
        ChshEstimate,
        SessionTranscript,
    )
    from pilotkey.orchestrator.pipeline import TrajectoryRun


class ExperimentConsole:
    """Rich console interface for experiment progress and results."""

    def __init__(self, verbose: bool = False, quiet: bool = False) -> None:
        self.console = Console(stderr=True, quiet=quiet)
        self.verbose = verbose

    def setup_logging(self, level: str = "INFO") -> None:
        logging.basicConfig(
            level="DEBUG" if self.verbose else level,
            format="%(message)s",
            handlers=[
                RichHandler(
                    console=self.console, rich_tracebacks=True, show_time=False, show_path=False
                )
            ],
            force=True,
        )

    def print_header(self, command: str, seed: int, n_pairs: int | None = None) -> None:
        header = Text()
        header.append("pilotkey", style="bold blue")
        header.append(" - Bohmian Stern-Gerlach key distribution\n\n", style="dim")
        header.append("Command: ", style="bold")
        header.append(f"{command}\n", style="green")
        header.append("Seed: ", style="bold")
        header.append(str(seed), style="dim")
        if n_pairs is not None:
            header.append("\nPairs: ", style="bold")
            header.append(str(n_pairs), style="dim")
        self.console.print(Panel(header, border_style="blue"))

    @contextmanager
    def progress(self) -> Iterator[Progress]:
        progress = Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(bar_width=30),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=self.console,
            expand=False,
        )
        with progress:
            yield progress

    def print_check_reports(self, reports: list[CheckReport]) -> None:
        print_check_reports(self.console, reports)

    def print_transcript_summary(self, transcript: SessionTranscript) -> None:
        print_transcript_summary(self.console, transcript)

    def print_chsh_estimate(self, estimate: ChshEstimate) -> None:
        print_chsh_estimate(self.console, estimate)

    def print_attack_report(self, report: AttackReport) -> None:
        print_attack_report(self.console, report)

    def print_trajectory_run(self, run: TrajectoryRun) -> None:
        print_trajectory_run(self.console, run)

    def print_success(self, message: str, output: str | None = None) -> None:
        body = f"[green]✓ {message}[/green]"
        if output:
            body += f"\n\n[bold]Output:[/bold] {output}"
        self.console.print(Panel(body, title="[green]Complete[/green]", border_style="green"))

    def print_error(self, error: str) -> None:
        self.console.print()
        self.console.print(
            Panel(f"[red]{error}[/red]", title="[red]Error[/red]", border_style="red")
        )
