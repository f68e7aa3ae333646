"""
BANDEDGE Reports
================
CSV output for the experiment runners.

Version: 1.0

Files:
- samples.csv       x, z, u, omega, rho, y
- slopes.csv        x, z, dydz
- summary.csv       x, eta_hat, K_hat, z_converged, converged
- edges.csv         band_index, side, omega_c, k_edge
- ldos_check.csv    omega, x, rho_mode, rho_greens, rel_dev

Numbers are written with 17 significant digits, so identical inputs give
byte-identical files.
"""

import csv
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from .experiments import Fig1Result, LdosCheckResult
from .photonic.crystal import BandEdge

logger = logging.getLogger(__name__)

SAMPLES_HEADER = ("x", "z", "u", "omega", "rho", "y")
SLOPES_HEADER = ("x", "z", "dydz")
SUMMARY_HEADER = ("x", "eta_hat", "K_hat", "z_converged", "converged")
EDGES_HEADER = ("band_index", "side", "omega_c", "k_edge")
LDOS_CHECK_HEADER = ("omega", "x", "rho_mode", "rho_greens", "rel_dev")


def format_number(value: Optional[float]) -> str:
    """17 significant digits; empty string for a missing value."""
    if value is None:
        return ""
    return f"{value:.17g}"


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info(f"Wrote {path}")
    return path


def write_fig1_outputs(result: Fig1Result, output_dir: Path) -> List[Path]:
    """Write samples.csv, slopes.csv and summary.csv; invalid samples are omitted."""
    output_dir = Path(output_dir)
    f = format_number
    samples = [
        (f(s.x), f(s.z), f(s.u), f(s.omega), f(s.rho), f(s.y))
        for position in result.positions
        for s in position.samples
        if s.valid
    ]
    slopes = [
        (f(position.x), f(p.z), f(p.dydz))
        for position in result.positions
        for p in position.slopes
    ]
    summary = [
        (
            f(p.estimate.x),
            f(p.estimate.eta_hat),
            f(p.estimate.K_hat),
            f(p.estimate.z_converged),
            "true" if p.estimate.converged else "false",
        )
        for p in result.positions
    ]
    return [
        _write_csv(output_dir / "samples.csv", SAMPLES_HEADER, samples),
        _write_csv(output_dir / "slopes.csv", SLOPES_HEADER, slopes),
        _write_csv(output_dir / "summary.csv", SUMMARY_HEADER, summary),
    ]


def write_edges(edges: Sequence[BandEdge], output_dir: Path) -> Path:
    rows = [(str(e.band_index), e.side, format_number(e.omega_c), format_number(e.k_edge)) for e in edges]
    return _write_csv(Path(output_dir) / "edges.csv", EDGES_HEADER, rows)


def write_ldos_check(result: LdosCheckResult, output_dir: Path) -> Path:
    f = format_number
    rows = [(f(r.omega), f(r.x), f(r.rho_mode), f(r.rho_greens), f(r.rel_dev)) for r in result.rows]
    return _write_csv(Path(output_dir) / "ldos_check.csv", LDOS_CHECK_HEADER, rows)
