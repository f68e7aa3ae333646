"""
BANDEDGE Photonic Core
======================
Transfer matrices, Bloch modes, LDOS and band-edge exponent extraction for
1-D photonic crystals.

Version: 1.0

Components:
- crystal: geometry, transfer matrices, dispersion, band edges, group velocity
- modes: normalized Bloch mode profiles and intensity nodes
- ldos: mode-expansion LDOS and the finite-stack Green's-function oracle
- exponent: log-log sampling, slope curves, exponent and prefactor estimates

Usage:
    from app.photonic import UnitCell, find_band_edges, ldos_mode_expansion

    cell = UnitCell.quarter_wave()
    edge = find_band_edges(cell, omega_max=4.0)[0]
    rho = ldos_mode_expansion(cell, 0.999 * edge.omega_c, x=0.0).rho
"""

from .crystal import (
    BandEdge,
    Layer,
    TransferMatrix,
    UnitCell,
    cell_half_trace,
    cell_matrix,
    dispersion_k,
    find_band_edges,
    group_velocity,
    half_trace_derivative,
    layer_matrix,
)
from .errors import (
    DegenerateBandError,
    DomainError,
    NoBandEdgeError,
    OracleOverflowError,
    PhotonicError,
    SampleCountError,
    ScanResolutionError,
    UnconvergedEstimateError,
    WronskianError,
)
from .exponent import (
    ExponentEstimate,
    LogLogSample,
    SlopePoint,
    apparent_exponent,
    estimate_eta,
    prefactor_K,
    sample_loglog,
    slope_curve,
)
from .ldos import (
    LdosValue,
    dos_total,
    edge_prefactor,
    ldos_cell_average,
    ldos_greens_finite,
    ldos_mode_expansion,
    ldos_profile,
)
from .modes import BlochMode, bloch_mode, find_intensity_nodes, intensity_at

__all__ = [
    # Crystal
    "Layer",
    "UnitCell",
    "TransferMatrix",
    "BandEdge",
    "layer_matrix",
    "cell_matrix",
    "cell_half_trace",
    "half_trace_derivative",
    "dispersion_k",
    "find_band_edges",
    "group_velocity",
    # Modes
    "BlochMode",
    "bloch_mode",
    "intensity_at",
    "find_intensity_nodes",
    # LDOS
    "LdosValue",
    "dos_total",
    "ldos_mode_expansion",
    "ldos_profile",
    "ldos_cell_average",
    "ldos_greens_finite",
    "edge_prefactor",
    # Exponent
    "LogLogSample",
    "SlopePoint",
    "ExponentEstimate",
    "sample_loglog",
    "slope_curve",
    "estimate_eta",
    "prefactor_K",
    "apparent_exponent",
    # Errors
    "PhotonicError",
    "DomainError",
    "ScanResolutionError",
    "DegenerateBandError",
    "WronskianError",
    "OracleOverflowError",
    "SampleCountError",
    "UnconvergedEstimateError",
    "NoBandEdgeError",
]

__version__ = "1.0"
