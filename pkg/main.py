#!/usr/bin/env python3
"""reladp: prove relative termination of term rewrite systems."""

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import questionary
import yaml
from rich.console import Console
from rich.markdown import Markdown
from rich.panel import Panel

from reladp.errors import ConfigError, ReladpError, TrsParseError
from reladp.prover import EXIT_CODES, ProverConfig

console = Console()

CORPUS_DIR = Path(__file__).resolve().parent / "corpus"

GUIDE_MD = """\
# reladp

Proves that a relative rewrite system R / R= terminates: no rewrite sequence
uses the main rules R infinitely often, however often the base rules R= are
used in between.

## Input

TPDB-style `.trs` files. `->` marks a main rule, `->=` a base rule.

    (VAR x y)
    (RULES
      a -> b
      f(s(y)) ->= d(f(y), a)
    )

## Commands

    python main.py prove FILE             Prove a file; first line is YES, NO or MAYBE
    python main.py prove FILE --proof json
    python main.py prove FILE --dot g.dot Write the dependency graphs of the proof
    python main.py prove FILE --no-loop-search
    python main.py bench DIR --csv out.csv Prove every .trs file of a directory
    python main.py adps FILE              Show the canonical annotated dependency pairs
    python main.py guide                  Show this guide
    python main.py                        Interactive menu

## Options

`--timeout S`   Give up after S seconds (answer MAYBE)
`--max-coeff N` Largest coefficient tried in polynomial interpretations
`--loop-depth D` Longest rewrite sequence the loop search explores
`--config PATH` Read defaults from another YAML file

## Exit codes

`0` YES, `1` NO, `2` MAYBE, `3` unreadable input or bad configuration, `4` other errors.

## Config

Edit `config.yaml` to change the defaults: timeout, coefficient bound, loop
search bounds, processor strategy, proof format and the log file.
Set `RELADP_SEED` to change the seed of the numeric re-check of orientations.
"""

EXIT_INPUT_ERROR = 3
EXIT_OTHER_ERROR = 4


def _load_config(path="config.yaml"):
    if not os.path.exists(path):
        console.print(f"[dim]{path} not found, using built-in defaults.[/]")
        return {}
    with open(path) as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"{path} is not valid YAML: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a mapping of sections")
    return data


def _setup_logging(config):
    settings = config.get("logging") or {}
    level = getattr(logging, str(settings.get("level", "INFO")).upper(), None)
    if not isinstance(level, int):
        raise ConfigError(f"unknown log level {settings.get('level')!r}")
    logging.basicConfig(
        filename=settings.get("file", "reladp.log"),
        level=level,
        format="%(asctime)s %(levelname)s %(message)s",
    )


def _prover_config(config, args=None):
    prover = ProverConfig.from_mapping(config.get("prover")).with_env_seed()
    if args is None:
        return prover
    overrides = {}
    if getattr(args, "timeout", None) is not None:
        overrides["timeout_seconds"] = args.timeout
    if getattr(args, "max_coeff", None) is not None:
        overrides["max_coeff"] = args.max_coeff
    if getattr(args, "loop_depth", None) is not None:
        overrides["loop_depth"] = args.loop_depth
    if getattr(args, "proof", None) is not None:
        overrides["proof_format"] = args.proof
    if getattr(args, "no_loop_search", False):
        overrides["loop_search"] = False
    return replace(prover, **overrides)


def run_prove(path, prover, dot_path=None):
    from reladp.parser import read_trs
    from reladp.proof import render_proof
    from reladp.prover import prove

    trs = read_trs(path)
    verdict, proof = prove(trs, prover)
    print(verdict)
    print(render_proof(proof, prover.proof_format))
    if dot_path:
        Path(dot_path).write_text(render_proof(proof, "dot"))
        console.print(f"[dim]Dependency graphs written to {dot_path}[/]", highlight=False)
    return EXIT_CODES[verdict]


def run_bench(directory, prover, csv_path=None):
    from reladp.bench import run_benchmark

    console.print(f"[bold cyan]Proving every .trs file in {directory}...[/]\n")
    report = run_benchmark(directory, prover, console=console)
    if not report.rows:
        console.print("No .trs files found.")
        return 0
    console.print(report.table())
    console.print(Panel(report.summary(), title="[bold cyan]Summary[/]", border_style="cyan"))
    if csv_path:
        report.write_csv(csv_path)
        console.print(f"[bold green]CSV written to {csv_path}[/]")
    return 0


def run_adps(path, prover, dot_path=None):
    from reladp.adp import canonical_adp_problem
    from reladp.graph import dependency_graph_dot
    from reladp.orders import preprocess
    from reladp.parser import read_trs

    trs = read_trs(path)
    pre = preprocess(trs, prover.max_coeff)
    if pre.moved:
        console.print(f"[yellow]Duplicating base rules moved to the main TRS:[/] {', '.join(map(str, pre.moved))}")
    if pre.removed:
        console.print(f"[yellow]Strictly decreasing rules removed:[/] {', '.join(map(str, pre.removed))}")
    problem = canonical_adp_problem(pre.trs)
    taken = {f.name for f in problem.signature}
    console.print("[bold cyan]Main ADPs[/]")
    for adp in problem.main:
        console.print(f"  {adp.show(taken)}", highlight=False)
    console.print("[bold cyan]Base ADPs[/]")
    for adp in problem.base:
        console.print(f"  {adp.show(taken)}", highlight=False)
    if dot_path:
        Path(dot_path).write_text(dependency_graph_dot(problem))
        console.print(f"[dim]Dependency graph written to {dot_path}[/]")
    return 0


def _menu(config):
    prover = _prover_config(config)
    while True:
        console.print()
        choice = questionary.select(
            "What would you like to do?",
            choices=[
                "Prove a file",
                "Run the bundled benchmark",
                "Show the canonical ADPs of a file",
                "Guide",
                "Exit",
            ],
        ).ask()
        if choice is None or choice == "Exit":
            console.print("[dim]Goodbye.[/]")
            return 0
        if choice == "Guide":
            console.print(Panel(Markdown(GUIDE_MD), title="[bold cyan]reladp[/]", border_style="cyan"))
            continue
        if choice == "Run the bundled benchmark":
            run_bench(CORPUS_DIR, prover)
            continue
        path = questionary.path("Path to a .trs file:").ask()
        if not path:
            continue
        try:
            if choice == "Prove a file":
                run_prove(path, prover)
            else:
                run_adps(path, prover)
        except (OSError, ReladpError) as e:
            console.print(f"[bold red]{e}[/]")


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code, never with a verdict code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        console.print(f"[bold red]Error:[/] {message}")
        sys.exit(EXIT_INPUT_ERROR)


def main():
    parser = _ArgumentParser(
        description="reladp: prove relative termination of term rewrite systems.",
        add_help=True,
    )
    parser.add_argument(
        "command",
        nargs="?",
        choices=["prove", "bench", "adps", "guide"],
        help="prove: prove a file | bench: prove a directory | adps: show ADPs | guide: show usage",
    )
    parser.add_argument("target", nargs="?", help="The .trs file (prove, adps) or directory (bench)")
    parser.add_argument("--config", default="config.yaml", help="YAML file with defaults (default: config.yaml)")
    parser.add_argument("--timeout", type=float, default=None, help="Give up after S seconds")
    parser.add_argument("--max-coeff", type=int, default=None, help="Largest interpretation coefficient")
    parser.add_argument("--loop-depth", type=int, default=None, help="Longest sequence the loop search explores")
    parser.add_argument("--proof", choices=["text", "json"], default=None, help="Proof output format")
    parser.add_argument("--dot", default=None, help="Write dependency graphs in DOT to this file")
    parser.add_argument("--no-loop-search", action="store_true", help="Only try to prove termination")
    parser.add_argument("--csv", default=None, help="bench: write the per-file results to this CSV file")

    args = parser.parse_args()

    if args.command == "guide":
        console.print(Panel(Markdown(GUIDE_MD), title="[bold cyan]reladp[/]", border_style="cyan"))
        return

    try:
        config = _load_config(args.config)
        _setup_logging(config)
        if args.command is None:
            sys.exit(_menu(config))
        if not args.target:
            parser.error(f"{args.command} needs a {'directory' if args.command == 'bench' else 'file'}")
        prover = _prover_config(config, args)
        if args.command == "prove":
            code = run_prove(args.target, prover, args.dot)
        elif args.command == "bench":
            csv_path = args.csv or (config.get("bench") or {}).get("csv")
            code = run_bench(args.target, prover, csv_path)
        else:
            code = run_adps(args.target, prover, args.dot)
    except (OSError, ConfigError, TrsParseError) as e:
        console.print(f"[bold red]Error:[/] {e}")
        sys.exit(EXIT_INPUT_ERROR)
    except ReladpError as e:
        console.print(f"[bold red]Error:[/] {e}")
        sys.exit(EXIT_OTHER_ERROR)
    except Exception as e:
        logging.error(f"{args.command} failed: {e!r}")
        console.print(f"[bold red]Unexpected error:[/] {e!r}")
        sys.exit(EXIT_OTHER_ERROR)
    sys.exit(code)


if __name__ == "__main__":
    main()
