"""
BANDEDGE Crystal
================
Geometry of the periodic stack, transfer matrices, Bloch dispersion,
band-edge location and group velocity.

Version: 1.0

Conventions:
- c = 1; frequencies are in units of c/a, thicknesses in units of a
- The first layer is centred at x = 0, so for the default cell the
  dielectric slab sits at x = 0 and the air region at x = 0.5
- Positions handed to the library are fractions of the period and wrap
  modulo 1
- Transfer matrices propagate the pair (E, dE/dx) from left to right
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError, ScanResolutionError

logger = logging.getLogger(__name__)

EdgeSide = Literal["lower", "upper"]

# Quarter-wave stack: n1*d1 = n2*d2 = 0.5
DEFAULT_LAYERS: Tuple[Tuple[float, float], ...] = ((2.0, 0.25), (1.0, 0.5))

# A scan point is in a gap only when |t| - 1 exceeds this
GAP_THRESHOLD = 1e-12
# ||t| - 1| at or below this counts as sitting exactly on a band edge
EDGE_TOLERANCE = 1e-12
EDGE_RTOL = 1e-14
DEFAULT_POINTS_PER_BAND = 400


def validate_frequency(omega: float, name: str = "omega") -> None:
    """Raise DomainError unless omega is a finite positive number."""
    if not math.isfinite(omega) or omega <= 0.0:
        raise DomainError(f"{name} must be a finite positive frequency, got {omega}")


# =============================================================================
# GEOMETRY
# =============================================================================

@dataclass(frozen=True)
class Layer:
    """Homogeneous, lossless, nondispersive slab."""
    n: float
    d: float

    def __post_init__(self):
        if not math.isfinite(self.n) or self.n < 1.0:
            raise DomainError(f"Refractive index must be >= 1, got {self.n}")
        if not math.isfinite(self.d) or self.d <= 0.0:
            raise DomainError(f"Layer thickness must be > 0, got {self.d}")

    @property
    def epsilon(self) -> float:
        return self.n * self.n


@dataclass(frozen=True)
class UnitCell:
    """
    One period of the stack.

    Layers are listed left to right. The first layer is centred at x = 0,
    so the cell occupies [-d_1/2, L - d_1/2) in physical coordinates.
    """
    layers: Tuple[Layer, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise DomainError("A unit cell needs at least one layer")

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[float, float]]) -> "UnitCell":
        """Build a cell from (n, d) pairs."""
        return cls(tuple(Layer(float(n), float(d)) for n, d in pairs))

    @classmethod
    def quarter_wave(cls) -> "UnitCell":
        """The default crystal: an n=2 slab of width 0.25 and 0.5 of air."""
        return cls.from_pairs(DEFAULT_LAYERS)

    @classmethod
    def homogeneous(cls, n: float = 1.0, d: float = 1.0) -> "UnitCell":
        return cls((Layer(n, d),))

    @property
    def L(self) -> float:
        return float(sum(layer.d for layer in self.layers))

    @property
    def origin(self) -> float:
        """Physical coordinate of the cell's left face."""
        return -0.5 * self.layers[0].d

    @property
    def boundaries(self) -> np.ndarray:
        """Offsets of every layer face from the cell's left face."""
        return np.concatenate(([0.0], np.cumsum([layer.d for layer in self.layers])))

    @property
    def optical_length(self) -> float:
        return float(sum(layer.n * layer.d for layer in self.layers))

    def scaled(self, factor: float) -> "UnitCell":
        """Copy of the cell with every thickness multiplied by factor."""
        return UnitCell(tuple(Layer(layer.n, layer.d * factor) for layer in self.layers))

    def locate(self, x) -> Tuple[np.ndarray, np.ndarray]:
        """
        Map fractional positions to layers.

        Args:
            x: Position(s) as fractions of the period (any real value)

        Returns:
            (layer index, offset from that layer's left face), same shape as x
        """
        x = np.asarray(x, dtype=float)
        offset = np.mod(x * self.L - self.origin, self.L)
        bounds = self.boundaries
        index = np.clip(np.searchsorted(bounds, offset, side="right") - 1, 0, len(self.layers) - 1)
        return index, offset - bounds[index]

    def epsilon_at(self, x) -> np.ndarray:
        index, _ = self.locate(x)
        return np.array([layer.epsilon for layer in self.layers])[index]


# =============================================================================
# TRANSFER MATRICES
# =============================================================================

@dataclass(frozen=True)
class TransferMatrix:
    """Real 2x2 propagator of (E, dE/dx) across a region at fixed frequency."""
    m11: float
    m12: float
    m21: float
    m22: float

    @classmethod
    def from_array(cls, array: np.ndarray) -> "TransferMatrix":
        return cls(float(array[0, 0]), float(array[0, 1]), float(array[1, 0]), float(array[1, 1]))

    def to_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def half_trace(self) -> float:
        return 0.5 * (self.m11 + self.m22)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        """Compose: (A @ B) propagates across B first, then A."""
        return TransferMatrix.from_array(self.to_array() @ other.to_array())


def propagator(n: float, d: float, omega: complex) -> np.ndarray:
    """
    Propagator across thickness d of index n.

    Works for complex frequencies (used by the finite-stack oracle) and for
    negative d (backward propagation).
    """
    q = n * omega
    theta = q * d
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s / q], [-q * s, c]])


def _propagator_with_derivative(n: float, d: float, omega: float) -> Tuple[np.ndarray, np.ndarray]:
    q = n * omega
    theta = q * d
    c, s = math.cos(theta), math.sin(theta)
    matrix = np.array([[c, s / q], [-q * s, c]])
    derivative = n * np.array([
        [-d * s, d * c / q - s / (q * q)],
        [-s - q * d * c, -d * s],
    ])
    return matrix, derivative


def layer_matrix(layer: Layer, omega: float) -> TransferMatrix:
    """Transfer matrix of a single layer: [[cos qd, sin qd / q], [-q sin qd, cos qd]], q = n*omega."""
    validate_frequency(omega)
    return TransferMatrix.from_array(propagator(layer.n, layer.d, omega))


def cell_array(cell: UnitCell, omega: complex) -> np.ndarray:
    """Ordered product M_N ... M_1 over the cell's layers as a numpy array."""
    product = np.eye(2, dtype=complex if isinstance(omega, complex) else float)
    for layer in cell.layers:
        product = propagator(layer.n, layer.d, omega) @ product
    return product


def cell_matrix(cell: UnitCell, omega: float) -> TransferMatrix:
    validate_frequency(omega)
    return TransferMatrix.from_array(cell_array(cell, omega))


def cell_half_trace(cell: UnitCell, omega: float) -> float:
    """Half-trace t of the cell matrix; cos(kL) = t inside bands."""
    validate_frequency(omega)
    product = cell_array(cell, omega)
    return 0.5 * float(product[0, 0] + product[1, 1])


def half_trace_derivative(cell: UnitCell, omega: float) -> Tuple[float, float]:
    """
    Half-trace and its frequency derivative.

    The derivative follows from the product rule applied to the ordered
    layer product, so no finite differencing is involved.

    Returns:
        (t, dt/domega)
    """
    validate_frequency(omega)
    product = np.eye(2)
    derivative = np.zeros((2, 2))
    for layer in cell.layers:
        matrix, d_matrix = _propagator_with_derivative(layer.n, layer.d, omega)
        derivative = d_matrix @ product + matrix @ derivative
        product = matrix @ product
    return 0.5 * float(np.trace(product)), 0.5 * float(np.trace(derivative))


def half_trace_grid(cell: UnitCell, omegas: np.ndarray) -> np.ndarray:
    """Vectorized half-trace over an array of real frequencies."""
    omegas = np.asarray(omegas, dtype=float)
    p11, p12 = np.ones_like(omegas), np.zeros_like(omegas)
    p21, p22 = np.zeros_like(omegas), np.ones_like(omegas)
    for layer in cell.layers:
        q = layer.n * omegas
        c, s = np.cos(q * layer.d), np.sin(q * layer.d)
        p11, p12, p21, p22 = (
            c * p11 + s / q * p21,
            c * p12 + s / q * p22,
            -q * s * p11 + c * p21,
            -q * s * p12 + c * p22,
        )
    return 0.5 * (p11 + p22)


# =============================================================================
# DISPERSION
# =============================================================================

def dispersion_k(cell: UnitCell, omega: float) -> Optional[float]:
    """
    Bloch wavenumber in [0, pi/L], or None when omega lies in a gap.
    """
    t = cell_half_trace(cell, omega)
    if abs(t) - 1.0 > EDGE_TOLERANCE:
        return None
    return math.acos(min(1.0, max(-1.0, t))) / cell.L


@dataclass(frozen=True)
class BandEdge:
    """
    A frequency bounding an allowed band.

    side is relative to gap gap_index: the lower edge of gap g is the top of
    band g, the upper edge is the bottom of band g + 1.
    """
    band_index: int
    side: EdgeSide
    omega_c: float
    k_edge: float
    gap_index: int
    half_trace: float


def _refine_edge(cell: UnitCell, band_side: float, gap_side: float) -> float:
    def excess(omega: float) -> float:
        return abs(cell_half_trace(cell, omega)) - 1.0

    if excess(band_side) >= 0.0:
        return float(band_side)
    lo, hi = sorted((band_side, gap_side))
    return float(bisect(excess, lo, hi, xtol=np.finfo(float).tiny, rtol=EDGE_RTOL, maxiter=200))


def find_band_edges(
    cell: UnitCell,
    omega_max: float,
    points_per_band: int = DEFAULT_POINTS_PER_BAND,
) -> List[BandEdge]:
    """
    Locate every band edge below omega_max.

    The half-trace is scanned on a grid fine enough to place points_per_band
    samples in each band; every sign change of |t| - 1 is refined by
    bisection to relative tolerance 1e-14. Gaps of zero width (degenerate
    touchings) never register as gap points and are not reported.

    Args:
        cell: Unit cell to analyse
        omega_max: Upper end of the scan
        points_per_band: Scan density

    Returns:
        Edges sorted by frequency

    Raises:
        ScanResolutionError: a gap opens and closes inside one scan step
    """
    validate_frequency(omega_max, "omega_max")
    if points_per_band < 1:
        raise DomainError(f"points_per_band must be >= 1, got {points_per_band}")

    step = math.pi / (cell.optical_length * points_per_band)
    n_points = max(int(math.ceil(omega_max / step)), 16)
    omegas = np.linspace(omega_max / n_points, omega_max, n_points)
    in_gap = np.abs(half_trace_grid(cell, omegas)) - 1.0 > GAP_THRESHOLD

    midpoints = 0.5 * (omegas[:-1] + omegas[1:])
    mid_in_gap = np.abs(half_trace_grid(cell, midpoints)) - 1.0 > GAP_THRESHOLD
    hidden = (in_gap[:-1] == in_gap[1:]) & (mid_in_gap != in_gap[:-1])
    if np.any(hidden):
        where = float(midpoints[np.argmax(hidden)])
        raise ScanResolutionError(
            f"Two band edges fall inside one scan step near omega={where:.6g}; "
            f"increase points_per_band (currently {points_per_band})"
        )

    logger.debug(f"Band-edge scan: {n_points} points up to omega={omega_max}")

    edges: List[BandEdge] = []
    gap_index = 0
    for i in np.nonzero(in_gap[:-1] != in_gap[1:])[0]:
        opening = not in_gap[i]
        a, b = float(omegas[i]), float(omegas[i + 1])
        omega_c = _refine_edge(cell, a, b) if opening else _refine_edge(cell, b, a)
        if opening:
            gap_index += 1
            side, band_index = "lower", gap_index
        else:
            side, band_index = "upper", gap_index + 1
        t = cell_half_trace(cell, omega_c)
        edges.append(BandEdge(
            band_index=band_index,
            side=side,
            omega_c=omega_c,
            k_edge=math.pi / cell.L if t < 0.0 else 0.0,
            gap_index=gap_index,
            half_trace=t,
        ))

    logger.debug(f"Found {len(edges)} band edge(s) below omega={omega_max}")
    return edges


def group_velocity(cell: UnitCell, omega: float) -> float:
    """
    Group velocity d(omega)/dk = L * sqrt(1 - t^2) / |dt/domega|.

    sqrt(1 - t^2) is evaluated as sqrt((1 - t)(1 + t)) to keep precision
    next to the band edges.

    Raises:
        DomainError: omega lies in a gap or exactly on a band edge
    """
    t, dt = half_trace_derivative(cell, omega)
    excess = abs(t) - 1.0
    if excess > EDGE_TOLERANCE:
        raise DomainError(f"omega={omega} lies in a band gap (|t| - 1 = {excess:.3e})")
    if abs(excess) <= EDGE_TOLERANCE:
        raise DomainError(f"omega={omega} sits on a band edge where the group velocity vanishes")
    if dt == 0.0:
        raise DomainError(f"Dispersion is stationary at omega={omega}")
    return cell.L * math.sqrt((1.0 - t) * (1.0 + t)) / abs(dt)
