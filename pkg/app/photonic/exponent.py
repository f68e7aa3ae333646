"""
BANDEDGE Exponent Extraction
============================
Log-log sampling of the LDOS next to a band edge, local slope curves,
asymptotic exponent estimation and prefactor recovery.

Version: 1.0

Variables:
- u = 1 - omega/omega_c below a lower edge, omega/omega_c - 1 above an upper edge
- z = log10(u), y = log10(rho)
- rho = K * |omega_c - omega|^eta  <=>  y = eta * (z + log10 omega_c) + log10 K
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from .crystal import EdgeSide, validate_frequency
from .errors import DomainError, SampleCountError, UnconvergedEstimateError

logger = logging.getLogger(__name__)

DEFAULT_SLOPE_TOL = 0.02
DEFAULT_WINDOW = 1.0


@dataclass(frozen=True)
class LogLogSample:
    """One LDOS evaluation at distance u from the edge. Invalid samples carry NaN rho/y."""
    x: float
    z: float
    u: float
    omega: float
    rho: float
    y: float
    valid: bool = True


@dataclass(frozen=True)
class SlopePoint:
    z: float
    dydz: float


@dataclass(frozen=True)
class ExponentEstimate:
    """
    Asymptotic exponent at one position.

    z_converged is the most positive z from which every slope down to the
    end of the grid stays within tol of eta_hat. K_hat is None until the
    prefactor has been recovered (only possible when converged).
    """
    x: float
    eta_hat: float
    K_hat: Optional[float]
    z_converged: float
    converged: bool
    on_node: bool = False


def frequency_at(omega_c: float, z: float, side: EdgeSide = "lower") -> float:
    """omega = omega_c (1 - 10^z) below a lower edge, omega_c (1 + 10^z) above an upper one."""
    u = 10.0 ** z
    return omega_c * (1.0 - u) if side == "lower" else omega_c * (1.0 + u)


def sample_loglog(
    rho_fn: Callable[[float], float],
    omega_c: float,
    z_grid: Sequence[float],
    x: float = 0.0,
    side: EdgeSide = "lower",
) -> List[LogLogSample]:
    """
    Evaluate rho_fn at omega_c (1 -+ 10^z) for every z of the grid.

    A sample whose frequency falls outside the band (rho_fn raises
    DomainError) or whose LDOS is not finite and positive is kept but
    flagged invalid.

    Raises:
        DomainError: omega_c <= 0 or some z >= 0
    """
    validate_frequency(omega_c, "omega_c")
    if side not in ("lower", "upper"):
        raise DomainError(f"side must be 'lower' or 'upper', got {side!r}")

    samples: List[LogLogSample] = []
    for z in z_grid:
        z = float(z)
        if not math.isfinite(z) or z >= 0.0:
            raise DomainError(f"z values must be finite and negative, got {z}")
        u = 10.0 ** z
        omega = frequency_at(omega_c, z, side)
        try:
            rho = float(rho_fn(omega))
        except DomainError as exc:
            logger.debug(f"Sample z={z:.4g} at x={x:.4g} rejected: {exc}")
            samples.append(LogLogSample(x, z, u, omega, math.nan, math.nan, valid=False))
            continue
        if not math.isfinite(rho) or rho <= 0.0:
            logger.debug(f"Sample z={z:.4g} at x={x:.4g} has unusable LDOS {rho}")
            samples.append(LogLogSample(x, z, u, omega, rho, math.nan, valid=False))
            continue
        samples.append(LogLogSample(x, z, u, omega, rho, math.log10(rho)))
    return samples


def slope_curve(samples: Sequence[LogLogSample]) -> List[SlopePoint]:
    """
    dy/dz over the valid samples, in sample order.

    Interior points use the centred difference of numpy.gradient (exact for
    quadratics on a uniform grid), the two ends one-sided differences.

    Raises:
        SampleCountError: fewer than 3 valid samples or repeated z values
    """
    valid = [s for s in samples if s.valid]
    if len(valid) < 3:
        raise SampleCountError(f"Need at least 3 valid samples for a slope curve, got {len(valid)}")
    z = np.array([s.z for s in valid])
    y = np.array([s.y for s in valid])
    if np.unique(z).size != z.size:
        raise SampleCountError("Slope curve needs distinct z values")
    dydz = np.gradient(y, z, edge_order=1)
    return [SlopePoint(float(a), float(b)) for a, b in zip(z, dydz)]


def estimate_eta(
    slopes: Sequence[SlopePoint],
    tol: float = DEFAULT_SLOPE_TOL,
    window: Optional[float] = DEFAULT_WINDOW,
    x: float = 0.0,
) -> ExponentEstimate:
    """
    Asymptotic exponent from a slope curve.

    eta_hat is the slope at the most negative z. The estimate is converged
    when the slope one window (in decades of u) further from the edge agrees
    with eta_hat to within tol; window=None compares the last two slopes.
    Unconverged is a reported state, not an error.
    """
    if tol <= 0.0:
        raise DomainError(f"Slope tolerance must be positive, got {tol}")
    ordered = sorted(slopes, key=lambda p: p.z, reverse=True)
    if len(ordered) < 2:
        raise SampleCountError("Need at least 2 slopes to judge convergence")

    last = ordered[-1]
    eta_hat = last.dydz
    if window is None:
        reference = ordered[-2]
    else:
        target = last.z + window
        reference = min(ordered[:-1], key=lambda p: abs(p.z - target))
    converged = abs(eta_hat - reference.dydz) < tol

    z_converged = last.z
    for point in reversed(ordered):
        if abs(point.dydz - eta_hat) >= tol:
            break
        z_converged = point.z

    return ExponentEstimate(
        x=x,
        eta_hat=eta_hat,
        K_hat=None,
        z_converged=z_converged,
        converged=converged,
    )


def prefactor_K(samples: Sequence[LogLogSample], estimate: ExponentEstimate, omega_c: float) -> float:
    """
    K_hat = 10^mean(y - eta_hat (z + log10 omega_c)) over the converged tail.

    Raises:
        UnconvergedEstimateError: the estimate is not converged
    """
    if not estimate.converged:
        raise UnconvergedEstimateError(
            f"Prefactor needs a converged exponent (x={estimate.x}, eta_hat={estimate.eta_hat:.4f})"
        )
    validate_frequency(omega_c, "omega_c")
    tail = [s for s in samples if s.valid and s.z <= estimate.z_converged]
    if not tail:
        raise SampleCountError("No valid samples in the converged tail")
    z = np.array([s.z for s in tail])
    y = np.array([s.y for s in tail])
    return float(10.0 ** np.mean(y - estimate.eta_hat * (z + math.log10(omega_c))))


def apparent_exponent(samples: Sequence[LogLogSample], z_hi: float, z_lo: float) -> float:
    """
    Least-squares log-log slope over the window z_lo <= z <= z_hi.

    Far from the edge this gives the misleading exponents the local slope
    procedure is meant to avoid.
    """
    if z_lo >= z_hi:
        raise DomainError(f"Window needs z_lo < z_hi, got [{z_lo}, {z_hi}]")
    window = [s for s in samples if s.valid and z_lo <= s.z <= z_hi]
    if len(window) < 2:
        raise SampleCountError(f"Need at least 2 valid samples in [{z_lo}, {z_hi}], got {len(window)}")
    slope, _ = np.polyfit([s.z for s in window], [s.y for s in window], 1)
    return float(slope)
