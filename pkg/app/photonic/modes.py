"""
BANDEDGE Bloch Modes
====================
Bloch mode field profiles inside the unit cell.

Version: 1.0

Modes come from the eigenvector of the cell transfer matrix and are
propagated analytically layer by layer, so field values are exact at any
position rather than interpolated from the sampling grid.

Normalization: (1/L) * integral over one cell of eps(x) |E(x)|^2 dx = 1.
Phase: E(x=0) is real and positive (E'(0) > 0 when E(0) vanishes).
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.optimize import minimize_scalar

from .crystal import EDGE_TOLERANCE, UnitCell, cell_array, propagator, validate_frequency
from .errors import DegenerateBandError, DomainError

logger = logging.getLogger(__name__)

MIN_GRID_SIZE = 64
DEFAULT_GRID_SIZE = 256
DEGENERACY_TOLERANCE = 1e-9
NODE_XTOL = 1e-12
NODE_TOLERANCE = 1e-8
# grid minima above this fraction of the peak are never nodes
NODE_CANDIDATE_FRACTION = 0.1
PHASE_FLOOR = 1e-12
WRAP_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class BlochMode:
    """
    Normalized Bloch mode at one frequency.

    layer_states holds (E, dE/dx) at every layer's left face followed by the
    cell's right face, so layer_states[-1] == bloch_factor * layer_states[0].
    """
    cell: UnitCell
    omega: float
    k: float
    grid: np.ndarray
    field: np.ndarray
    layer_states: np.ndarray
    at_edge: bool

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.field) ** 2

    @property
    def bloch_factor(self) -> complex:
        return cmath.exp(1j * self.k * self.cell.L)

    def state_at(self, x) -> np.ndarray:
        """(E, dE/dx) at fractional position(s) x, shape x.shape + (2,)."""
        return _state_at(self.cell, self.omega, self.layer_states, x)


def _state_at(cell: UnitCell, omega: float, states: np.ndarray, x) -> np.ndarray:
    index, offset = cell.locate(x)
    q = np.array([layer.n for layer in cell.layers])[index] * omega
    e0, f0 = states[index, 0], states[index, 1]
    c, s = np.cos(q * offset), np.sin(q * offset)
    return np.stack([e0 * c + f0 * s / q, -q * s * e0 + c * f0], axis=-1)


def _eigenvector(product: np.ndarray, eigenvalue: complex) -> np.ndarray:
    first = np.array([product[0, 1], eigenvalue - product[0, 0]])
    second = np.array([eigenvalue - product[1, 1], product[1, 0]])
    return first if np.linalg.norm(first) >= np.linalg.norm(second) else second


def _layer_intensity_integral(e: complex, f: complex, q: float, d: float) -> float:
    """Integral of |E c + F s / q|^2 across one layer, c = cos(q s), s = sin(q s)."""
    half_sin = math.sin(2.0 * q * d) / (4.0 * q)
    cross = float((e * np.conj(f)).real)
    return float(
        abs(e) ** 2 * (0.5 * d + half_sin)
        + abs(f) ** 2 / (q * q) * (0.5 * d - half_sin)
        + cross * math.sin(q * d) ** 2 / (q * q)
    )


def weighted_norm(cell: UnitCell, omega: float, states: np.ndarray) -> float:
    """(1/L) * integral of eps |E|^2 over the cell, evaluated in closed form."""
    total = 0.0
    for layer, (e, f) in zip(cell.layers, states[:-1]):
        total += layer.epsilon * _layer_intensity_integral(e, f, layer.n * omega, layer.d)
    return total / cell.L


def bloch_mode(cell: UnitCell, omega: float, grid_size: int = DEFAULT_GRID_SIZE) -> BlochMode:
    """
    Build the normalized Bloch mode at omega.

    Inside a band the mode with k in (0, pi/L) is returned. At a band edge
    (||t| - 1| <= 1e-12) the mode is the real standing wave with eigenvalue
    sign(t).

    Args:
        cell: Unit cell
        omega: Frequency inside a band or on its edge
        grid_size: Number of uniform samples of x in [0, 1)

    Raises:
        DomainError: omega is in a gap, or grid_size < 64
        DegenerateBandError: omega sits on a degenerate band touching
    """
    validate_frequency(omega)
    if grid_size < MIN_GRID_SIZE:
        raise DomainError(f"grid_size must be >= {MIN_GRID_SIZE}, got {grid_size}")

    product = cell_array(cell, omega)
    t = 0.5 * float(product[0, 0] + product[1, 1])
    excess = abs(t) - 1.0
    if excess > EDGE_TOLERANCE:
        raise DomainError(f"omega={omega} lies inside a band gap (|t| - 1 = {excess:.3e})")

    at_edge = abs(excess) <= EDGE_TOLERANCE
    if at_edge:
        eigenvalue = math.copysign(1.0, t)
        scale = max(1.0, float(np.max(np.abs(product))))
        if np.max(np.abs(product - eigenvalue * np.eye(2))) <= DEGENERACY_TOLERANCE * scale:
            raise DegenerateBandError(
                f"Cell matrix is {eigenvalue:+.0f} * identity at omega={omega}; "
                "the band-edge mode is not unique"
            )
        k = 0.0 if eigenvalue > 0 else math.pi / cell.L
        start = _eigenvector(product, eigenvalue).astype(complex)
    else:
        eigenvalue = complex(t, math.sqrt((1.0 - t) * (1.0 + t)))
        k = math.acos(t) / cell.L
        start = _eigenvector(product, eigenvalue)

    states = [start]
    for layer in cell.layers:
        states.append(propagator(layer.n, layer.d, omega) @ states[-1])
    states = np.array(states, dtype=complex)
    states /= math.sqrt(weighted_norm(cell, omega, states))

    e0, f0 = _state_at(cell, omega, states, 0.0)
    reference = e0 if abs(e0) > PHASE_FLOOR else f0
    states *= abs(reference) / reference
    if at_edge:
        states = states.real.copy()

    grid = np.arange(grid_size) / grid_size
    field = _state_at(cell, omega, states, grid)[..., 0]
    logger.debug(f"Bloch mode at omega={omega:.12g}: k={k:.6g}, edge={at_edge}")
    return BlochMode(
        cell=cell,
        omega=omega,
        k=k,
        grid=grid,
        field=field,
        layer_states=states,
        at_edge=at_edge,
    )


def intensity_at(mode: BlochMode, x):
    """|E(x)|^2 at fractional position(s) x; scalar in, float out."""
    values = np.abs(mode.state_at(x)[..., 0]) ** 2
    return float(values) if np.ndim(values) == 0 else values


def _wrap(x: float) -> float:
    x = float(x) % 1.0
    return 0.0 if x > 1.0 - WRAP_TOLERANCE else x


def find_intensity_nodes(mode: BlochMode, tol: float = NODE_TOLERANCE) -> List[float]:
    """
    Positions in [0, 1) where |E|^2 / max|E|^2 < tol.

    Each discrete local minimum on the mode grid is refined with a bounded
    Brent minimization over its neighbouring grid cells.
    """
    if not 0.0 < tol < 1.0:
        raise DomainError(f"Node tolerance must lie in (0, 1), got {tol}")
    intensity = mode.intensity
    peak = float(intensity.max())
    if peak <= 0.0:
        return []

    h = 1.0 / len(mode.grid)
    is_minimum = (intensity <= np.roll(intensity, 1)) & (intensity <= np.roll(intensity, -1))
    candidates = np.nonzero(is_minimum & (intensity < NODE_CANDIDATE_FRACTION * peak))[0]

    nodes: List[float] = []
    for i in candidates:
        centre = float(mode.grid[i])
        result = minimize_scalar(
            lambda x: intensity_at(mode, x),
            bounds=(centre - h, centre + h),
            method="bounded",
            options={"xatol": NODE_XTOL},
        )
        if result.fun / peak >= tol:
            continue
        x = _wrap(result.x)
        if all(min(abs(x - other), 1.0 - abs(x - other)) > 1e-6 for other in nodes):
            nodes.append(x)

    nodes.sort()
    logger.debug(f"Found {len(nodes)} intensity node(s) at omega={mode.omega:.12g}")
    return nodes
