"""Benchmark harness: prove every .trs file of a directory and report."""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn
from rich.table import Table

from reladp.errors import ReladpError
from reladp.parser import read_trs
from reladp.prover import MAYBE, NO, YES, ProverConfig, prove

log = logging.getLogger(__name__)

CSV_FIELDS = ["file", "verdict", "seconds", "error"]


@dataclass(frozen=True)
class BenchRow:
    file: str
    verdict: str
    seconds: float
    error: str = ""


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)

    def count(self, verdict: str) -> int:
        return sum(1 for r in self.rows if r.verdict == verdict)

    @property
    def errors(self) -> int:
        return sum(1 for r in self.rows if r.error)

    @property
    def average_seconds(self) -> float:
        return sum(r.seconds for r in self.rows) / len(self.rows) if self.rows else 0.0

    def verdicts(self) -> dict:
        return {r.file: r.verdict for r in self.rows}

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
            writer.writeheader()
            for r in self.rows:
                writer.writerow({"file": r.file, "verdict": r.verdict, "seconds": f"{r.seconds:.3f}", "error": r.error})

    def table(self) -> Table:
        table = Table(title="Benchmark", show_header=True, header_style="bold cyan")
        table.add_column("File", style="white")
        table.add_column("Verdict", style="bold")
        table.add_column("Seconds", justify="right", style="bold yellow")
        table.add_column("Note", style="dim")
        colors = {YES: "green", NO: "red", MAYBE: "yellow"}
        for r in self.rows:
            color = colors.get(r.verdict, "magenta")
            table.add_row(r.file, f"[{color}]{r.verdict}[/]", f"{r.seconds:.2f}", r.error)
        return table

    def summary(self) -> Table:
        table = Table(show_header=True, header_style="bold cyan")
        table.add_column("Verdict", style="white")
        table.add_column("Count", justify="right", style="bold yellow")
        for verdict in (YES, NO, MAYBE):
            table.add_row(verdict, str(self.count(verdict)))
        table.add_row("errors", str(self.errors))
        table.add_row("average seconds", f"{self.average_seconds:.2f}")
        return table


def run_benchmark(
    directory,
    config: ProverConfig = ProverConfig(),
    console: Optional[Console] = None,
    on_result: Optional[Callable[[BenchRow], None]] = None,
) -> BenchReport:
    """Prove every .trs file under directory, in name order.

    A file that cannot be read or parsed is reported with verdict ERROR and
    the run continues.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise NotADirectoryError(f"{directory} is not a directory")
    files = sorted(directory.glob("*.trs"))
    report = BenchReport()
    console = console or Console(quiet=True)
    with Progress(
        SpinnerColumn(),
        TextColumn("[bold cyan]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
        transient=True,
    ) as progress:
        task = progress.add_task("Proving", total=len(files))
        for path in files:
            progress.update(task, description=path.name)
            start = time.perf_counter()
            try:
                verdict, _ = prove(read_trs(path), config)
                row = BenchRow(path.name, verdict, time.perf_counter() - start)
            except (OSError, ReladpError) as exc:
                log.warning("skipping %s: %s", path, exc)
                row = BenchRow(path.name, "ERROR", time.perf_counter() - start, str(exc))
            log.info("%s: %s in %.2fs", row.file, row.verdict, row.seconds)
            report.rows.append(row)
            if on_result is not None:
                on_result(row)
            progress.advance(task)
    return report
