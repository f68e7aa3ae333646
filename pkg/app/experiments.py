"""
BANDEDGE Experiments
====================
Pure pipelines behind the CLI subcommands.

Version: 1.0

Pipelines:
- select_edge: locate the configured band edge
- analyze_position: sample -> slopes -> exponent -> prefactor at one x
- run_fig1_analysis: analyze_position over every configured position
- run_ldos_check_analysis: mode expansion vs finite-stack Green's function

Positions and oracle points are evaluated on a thread pool; results keep
the input order so output files do not depend on the thread count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

from .config import ExperimentConfig
from .photonic.crystal import BandEdge, EdgeSide, UnitCell, find_band_edges
from .photonic.errors import NoBandEdgeError
from .photonic.exponent import (
    ExponentEstimate,
    LogLogSample,
    SlopePoint,
    estimate_eta,
    prefactor_K,
    sample_loglog,
    slope_curve,
)
from .photonic.ldos import (
    dos_total,
    edge_prefactor,
    ldos_cell_average,
    ldos_greens_finite,
    ldos_mode_expansion,
)
from .photonic.modes import NODE_TOLERANCE, bloch_mode, intensity_at

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def _map_ordered(fn: Callable[[T], R], items: Iterable[T], threads: int) -> List[R]:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# =============================================================================
# BAND EDGE
# =============================================================================

def select_edge(
    cell: UnitCell,
    gap_index: int,
    side: EdgeSide,
    omega_max: float,
    points_per_band: int,
) -> BandEdge:
    """
    Return the requested edge of gap gap_index.

    Raises:
        NoBandEdgeError: the cell has no band gap below omega_max, or fewer
            gaps than gap_index
    """
    edges = find_band_edges(cell, omega_max, points_per_band)
    if not edges:
        raise NoBandEdgeError(f"no band gap below omega_max={omega_max}")
    for edge in edges:
        if edge.gap_index == gap_index and edge.side == side:
            logger.info(f"Using {side} edge of gap {gap_index}: omega_c = {edge.omega_c:.15g}")
            return edge
    raise NoBandEdgeError(
        f"no {side} edge for gap {gap_index} below omega_max={omega_max} "
        f"({len(edges)} edge(s) found)"
    )


# =============================================================================
# PER-POSITION PIPELINE
# =============================================================================

@dataclass(frozen=True)
class PositionResult:
    """Everything computed at one position: samples, slopes and the estimate."""
    x: float
    samples: List[LogLogSample]
    slopes: List[SlopePoint]
    estimate: ExponentEstimate
    K_effective_mass: float


def analyze_position(
    cell: UnitCell,
    edge: BandEdge,
    x: float,
    z_grid: Sequence[float],
    tol: float,
    window: Optional[float] = 1.0,
    grid_size: int = 256,
) -> PositionResult:
    """
    Run the exponent procedure at one position.

    The prefactor is recovered only when the estimate converged. Positions
    where the edge mode intensity vanishes are flagged on_node: there the
    LDOS tends to zero at the edge and the slope approaches -eta instead.
    """
    mode = bloch_mode(cell, edge.omega_c, grid_size)
    relative = intensity_at(mode, x) / float(mode.intensity.max())
    on_node = relative < NODE_TOLERANCE
    if on_node:
        logger.warning(
            f"x={x:g} sits on an intensity node of the edge mode "
            f"(|E|^2 / max = {relative:.1e}); eta_hat there is not -0.5"
        )

    samples = sample_loglog(
        lambda omega: ldos_mode_expansion(cell, omega, x).rho,
        edge.omega_c,
        z_grid,
        x=x,
        side=edge.side,
    )
    invalid = sum(not s.valid for s in samples)
    if invalid:
        logger.debug(f"x={x:g}: {invalid} sample(s) fell outside the band")

    slopes = slope_curve(samples)
    estimate = replace(estimate_eta(slopes, tol, window, x=x), on_node=on_node)
    if estimate.converged:
        estimate = replace(estimate, K_hat=prefactor_K(samples, estimate, edge.omega_c))
    else:
        logger.warning(
            f"x={x:g}: slope not converged at z={slopes[-1].z:g} (eta_hat={estimate.eta_hat:.4f})"
        )

    return PositionResult(
        x=x,
        samples=samples,
        slopes=slopes,
        estimate=estimate,
        K_effective_mass=edge_prefactor(cell, edge, x, grid_size),
    )


@dataclass(frozen=True)
class Fig1Result:
    edge: BandEdge
    positions: List[PositionResult]


def run_fig1_analysis(config: ExperimentConfig) -> Fig1Result:
    """Exponent procedure at every configured position, in position order."""
    cell = config.build_cell()
    edge = select_edge(cell, config.gap_index, config.edge_side, config.omega_max, config.points_per_band)
    z_grid = config.z_grid()

    def run(x: float) -> PositionResult:
        return analyze_position(
            cell, edge, x, z_grid, config.slope_tol, config.convergence_window, config.grid_size
        )

    results = _map_ordered(run, config.positions, config.threads)
    for result in results:
        est = result.estimate
        logger.info(
            f"x={est.x:g}: eta_hat={est.eta_hat:.5f} converged={est.converged} "
            f"z_converged={est.z_converged:g} K_hat={est.K_hat} K_em={result.K_effective_mass:.6g}"
        )
    return Fig1Result(edge=edge, positions=results)


# =============================================================================
# LDOS CROSS-CHECK
# =============================================================================

@dataclass(frozen=True)
class LdosCheckRow:
    omega: float
    x: float
    rho_mode: float
    rho_greens: float
    rel_dev: float


@dataclass(frozen=True)
class LdosCheckResult:
    rows: List[LdosCheckRow]
    max_deviation: float
    identity_residual: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.bound


def run_ldos_check_analysis(config: ExperimentConfig) -> LdosCheckResult:
    """
    Compare mode-expansion and Green's-function LDOS at the oracle points.

    Also reports the largest relative residual of the cell-average identity
    (eps-weighted mean of the LDOS equals the total DOS) over the same
    frequencies.
    """
    cell = config.build_cell()

    def check(point) -> LdosCheckRow:
        omega, x = point
        rho_mode = ldos_mode_expansion(cell, omega, x).rho
        rho_greens = ldos_greens_finite(cell, config.oracle_periods, omega, x, config.oracle_loss)
        return LdosCheckRow(omega, x, rho_mode, rho_greens, (rho_greens - rho_mode) / rho_mode)

    rows = _map_ordered(check, config.oracle_points, config.threads)
    residuals = [
        abs(ldos_cell_average(cell, omega) / dos_total(cell, omega) - 1.0)
        for omega in sorted({omega for omega, _ in config.oracle_points})
    ]
    max_deviation = float(np.max([abs(row.rel_dev) for row in rows])) if rows else 0.0
    result = LdosCheckResult(
        rows=rows,
        max_deviation=max_deviation,
        identity_residual=float(max(residuals, default=0.0)),
        bound=config.oracle_bound,
    )
    logger.info(
        f"LDOS check: max deviation {result.max_deviation:.3e} (bound {result.bound:g}), "
        f"cell-average residual {result.identity_residual:.3e}"
    )
    return result
