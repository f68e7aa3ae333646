"""
BANDEDGE Local Density of States
================================
Local density of states of the infinite crystal by Bloch mode expansion,
plus a finite-stack Green's-function oracle used to cross-check it.

Version: 1.0

Normalization: the LDOS is per unit length of the crystal. For the
homogeneous medium n = 1 it equals 1/pi, and its eps-weighted cell
average equals the total density of states 1 / (pi * v_g).
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .crystal import (
    BandEdge,
    UnitCell,
    cell_array,
    group_velocity,
    half_trace_derivative,
    propagator,
    validate_frequency,
)
from .errors import DomainError, OracleOverflowError, WronskianError
from .modes import MIN_GRID_SIZE, bloch_mode, intensity_at

logger = logging.getLogger(__name__)

DEFAULT_LOSS = 1e-3
MAX_LOSS = 1e-3
WRONSKIAN_RTOL = 1e-13
QUADRATURE_ORDER = 32


@dataclass(frozen=True)
class LdosValue:
    omega: float
    x: float
    rho: float


def dos_total(cell: UnitCell, omega: float) -> float:
    """Total density of states per unit length, 1 / (pi * v_g)."""
    return 1.0 / (math.pi * group_velocity(cell, omega))


def ldos_profile(cell: UnitCell, omega: float, xs, grid_size: int = MIN_GRID_SIZE) -> np.ndarray:
    """LDOS at many positions of the same frequency; one mode solve."""
    dos = dos_total(cell, omega)
    mode = bloch_mode(cell, omega, grid_size)
    return dos * np.abs(mode.state_at(np.asarray(xs, dtype=float))[..., 0]) ** 2


def ldos_mode_expansion(cell: UnitCell, omega: float, x: float) -> LdosValue:
    """
    rho(omega, x) = (1/pi) |dk/domega| |E_k(x)|^2.

    The +k and -k modes carry equal intensity, so the sum over both
    propagation directions folds into the single prefactor.

    Raises:
        DomainError: omega in a gap or on a band edge
    """
    rho = float(ldos_profile(cell, omega, x))
    return LdosValue(omega=omega, x=x, rho=rho)


def cell_average(
    cell: UnitCell,
    values: Callable[[np.ndarray], np.ndarray],
    order: int = QUADRATURE_ORDER,
    weighted: bool = True,
) -> float:
    """
    (1/L) * integral over one cell of [eps(x)] values(x) dx.

    Gauss-Legendre quadrature is applied inside each layer so the
    permittivity jumps never fall inside a quadrature panel.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    bounds = cell.boundaries
    total = 0.0
    for j, layer in enumerate(cell.layers):
        a, b = bounds[j], bounds[j + 1]
        offsets = a + 0.5 * (b - a) * (nodes + 1.0)
        xs = (offsets + cell.origin) / cell.L
        panel = 0.5 * (b - a) * float(np.dot(weights, values(xs)))
        total += layer.epsilon * panel if weighted else panel
    return total / cell.L


def ldos_cell_average(cell: UnitCell, omega: float, order: int = QUADRATURE_ORDER) -> float:
    """eps-weighted cell average of the LDOS; equals dos_total(cell, omega)."""
    dos = dos_total(cell, omega)
    mode = bloch_mode(cell, omega, MIN_GRID_SIZE)
    return dos * cell_average(cell, lambda xs: intensity_at(mode, xs), order)


def edge_prefactor(cell: UnitCell, edge: BandEdge, x: float, grid_size: int = MIN_GRID_SIZE) -> float:
    """
    Effective-mass prefactor K(x) of rho ~ K(x) * u^(-1/2) next to an edge.

    With t(omega) ~ +-1 -+ |t'| (omega_c - omega) the dispersion is
    quadratic, giving K_total = sqrt(|t'(omega_c)| / 2) / (pi L) and
    K(x) = K_total * |E_edge(x)|^2.
    """
    _, slope = half_trace_derivative(cell, edge.omega_c)
    total = math.sqrt(abs(slope) / 2.0) / (math.pi * cell.L)
    mode = bloch_mode(cell, edge.omega_c, grid_size)
    return total * intensity_at(mode, x)


# =============================================================================
# FINITE-STACK ORACLE
# =============================================================================

def _wronskian(left: np.ndarray, right: np.ndarray) -> complex:
    value = left[0] * right[1] - left[1] * right[0]
    scale = abs(left[0] * right[1]) + abs(left[1] * right[0])
    if scale == 0.0 or abs(value) <= WRONSKIAN_RTOL * scale:
        raise WronskianError(
            f"Wronskian vanishes relative to its terms (|W| = {abs(value):.3e}); use loss > 0"
        )
    return complex(value)


def ldos_greens_finite(
    cell: UnitCell,
    periods: int,
    omega: float,
    x: float,
    loss: float = DEFAULT_LOSS,
) -> float:
    """
    LDOS from the Green's function of a finite stack embedded in vacuum.

    The stack has `periods` cells; x refers to the cell with index
    periods // 2. The frequency is made complex, omega * (1 + i*loss), and
    rho = -(2/pi) * omega * Im G(x, x) with G = E_L E_R / W, where E_L and
    E_R are the solutions radiating out of the left and right faces.

    Raises:
        DomainError: bad periods, loss or omega
        WronskianError: the two solutions are numerically dependent
        OracleOverflowError: propagation produced non-finite numbers
    """
    validate_frequency(omega)
    if periods < 1:
        raise DomainError(f"periods must be >= 1, got {periods}")
    if not math.isfinite(loss) or not 0.0 <= loss <= MAX_LOSS:
        raise DomainError(f"loss must lie in [0, {MAX_LOSS}], got {loss}")

    w = omega * complex(1.0, loss)
    centre = periods // 2
    index, offset = cell.locate(x)
    index, offset = int(index), float(offset)
    here = cell.layers[index]

    product = cell_array(cell, w)
    inverse = np.array([[product[1, 1], -product[0, 1]], [-product[1, 0], product[0, 0]]])

    with np.errstate(over="ignore", invalid="ignore"):
        left = np.linalg.matrix_power(product, centre) @ np.array([1.0, -1j * w])
        for layer in cell.layers[:index]:
            left = propagator(layer.n, layer.d, w) @ left
        left = propagator(here.n, offset, w) @ left

        right = np.linalg.matrix_power(inverse, periods - centre - 1) @ np.array([1.0, 1j * w])
        for layer in reversed(cell.layers[index + 1:]):
            right = propagator(layer.n, -layer.d, w) @ right
        right = propagator(here.n, -(here.d - offset), w) @ right

    if not (np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
        raise OracleOverflowError(
            f"Field propagation overflowed for {periods} periods at omega={omega}"
        )

    green = left[0] * right[0] / _wronskian(left, right)
    rho = -(2.0 / math.pi) * omega * green.imag
    if not math.isfinite(rho):
        raise OracleOverflowError(f"Non-finite LDOS at omega={omega}, x={x}")
    logger.debug(f"Oracle LDOS N={periods} omega={omega:.6g} x={x:.6g}: {rho:.10g}")
    return float(rho)
