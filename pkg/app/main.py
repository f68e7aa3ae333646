#!/usr/bin/env python3
"""
BANDEDGE - Band-edge LDOS exponents of 1-D photonic crystals
============================================================

Version: 1.0

CLI Usage:
  bandedge fig1             Exponent extraction at every configured position
  bandedge band-edges       List the band edges of the configured cell
  bandedge ldos-check       Mode expansion vs finite-stack Green's function
  bandedge --help           Show all options

Common flags:
  --config <path>           key = value experiment file
  --out <dir>               Output directory for CSV files
  --threads <n>             Worker threads for per-position pipelines
  --debug                   Debug logging

Exit codes:
  0  success
  1  configuration or usage error
  2  numerical failure (no band gap, Wronskian failure, deviation above bound)
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.table import Table

from .config import ConfigError, ExperimentConfig, load_config
from .experiments import run_fig1_analysis, run_ldos_check_analysis
from .photonic.crystal import find_band_edges
from .photonic.errors import PhotonicError
from .reports import format_number, write_edges, write_fig1_outputs, write_ldos_check

# Version info
__version__ = "1.0"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

logger = logging.getLogger(__name__)


class BandEdgeArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with the config-error code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="key = value experiment file")
    common.add_argument("--out", type=Path, default=None, help="Output directory (default: results)")
    common.add_argument("--threads", type=int, default=None, help="Worker threads (default: 1)")
    common.add_argument("--debug", action="store_true", help="Enable debug logging")

    parser = BandEdgeArgumentParser(
        prog="bandedge",
        description="BANDEDGE - band-edge LDOS exponents of 1-D photonic crystals",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  bandedge fig1                          Default quarter-wave experiment
  bandedge fig1 --config run.cfg         Experiment from a config file
  bandedge band-edges --out edges/       Band edges written to edges/edges.csv
  bandedge ldos-check --threads 4        Oracle comparison on 4 threads
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=BandEdgeArgumentParser)
    subparsers.add_parser("fig1", parents=[common], help="Exponent extraction at every position")
    subparsers.add_parser("band-edges", parents=[common], help="List band edges")
    subparsers.add_parser("ldos-check", parents=[common], help="Cross-check LDOS against the Green's function")
    return parser


def _banner(console: Console, title: str) -> None:
    console.print()
    console.print("═" * 55)
    console.print(f"  {title}")
    console.print("═" * 55)


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def run_fig1(config: ExperimentConfig, console: Console) -> int:
    """
    Exponent extraction at every configured position.

    Writes samples.csv, slopes.csv and summary.csv to the output directory.
    """
    result = run_fig1_analysis(config)
    write_fig1_outputs(result, config.output_dir)

    _banner(console, f"Band-edge exponents ({result.edge.side} edge, omega_c = {result.edge.omega_c:.12g})")
    table = Table()
    for column in ("x", "eta_hat", "K_hat", "K (effective mass)", "z_converged", "converged"):
        table.add_column(column, justify="right")
    for position in result.positions:
        est = position.estimate
        table.add_row(
            f"{est.x:g}",
            f"{est.eta_hat:+.5f}",
            "-" if est.K_hat is None else f"{est.K_hat:.6g}",
            f"{position.K_effective_mass:.6g}",
            f"{est.z_converged:g}",
            ("✓" if est.converged else "✗") + (" (node)" if est.on_node else ""),
        )
    console.print(table)
    console.print(f"Results written to {config.output_dir}")
    return EXIT_OK


def run_band_edges(config: ExperimentConfig, console: Console) -> int:
    """List every band edge below omega_max and write edges.csv."""
    edges = find_band_edges(config.build_cell(), config.omega_max, config.points_per_band)
    write_edges(edges, config.output_dir)

    _banner(console, f"Band edges below omega = {config.omega_max:g}")
    table = Table()
    for column in ("band_index", "side", "omega_c", "k_edge"):
        table.add_column(column, justify="right")
    for edge in edges:
        table.add_row(str(edge.band_index), edge.side, format_number(edge.omega_c), f"{edge.k_edge:.12g}")
    console.print(table)
    if not edges:
        console.print("No band edges found (no band gap below omega_max)")
    return EXIT_OK


def run_ldos_check(config: ExperimentConfig, console: Console) -> int:
    """Compare the two LDOS methods; exit 0 iff the deviation is within the bound."""
    result = run_ldos_check_analysis(config)
    write_ldos_check(result, config.output_dir)

    _banner(console, f"LDOS check: N = {config.oracle_periods}, loss = {config.oracle_loss:g}")
    table = Table()
    for column in ("omega", "x", "rho (modes)", "rho (Green)", "rel. dev."):
        table.add_column(column, justify="right")
    for row in result.rows:
        table.add_row(
            f"{row.omega:g}", f"{row.x:g}", f"{row.rho_mode:.8g}", f"{row.rho_greens:.8g}", f"{row.rel_dev:+.3e}"
        )
    console.print(table)
    console.print(f"Max relative deviation: {result.max_deviation:.3e} (bound {result.bound:g})")
    console.print(f"Cell-average identity residual: {result.identity_residual:.3e}")
    if result.passed:
        console.print("Status: PASS ✓")
        return EXIT_OK
    console.print("Status: FAIL ✗")
    return EXIT_NUMERICAL


COMMANDS = {
    "fig1": run_fig1,
    "band-edges": run_band_edges,
    "ldos-check": run_ldos_check,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = create_parser()
    args = parser.parse_args(sys.argv[1:] if argv is None else argv)
    console = Console()

    if args.debug:
        logging.basicConfig(level=logging.DEBUG)

    try:
        config = load_config(args.config, {"output_dir": args.out, "threads": args.threads})
    except ConfigError as exc:
        console.print(f"[red]Configuration error:[/red] {exc}")
        return EXIT_CONFIG

    if not args.debug:
        logging.basicConfig(level=getattr(logging, config.log_level))

    try:
        return COMMANDS[args.command](config, console)
    except PhotonicError as exc:
        logger.error(f"{args.command} failed: {exc}")
        console.print(f"[red]Numerical failure:[/red] {exc}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
