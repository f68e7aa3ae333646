"""
BANDEDGE - Band-edge LDOS exponents of 1-D photonic crystals
============================================================
Computes the local density of states of layered periodic media and
extracts the power-law exponent of its divergence at a band edge.

Version: 1.0

Features:
- Transfer-matrix band structure with bisection-refined band edges
- Normalized Bloch modes and intensity-node detection
- Mode-expansion LDOS cross-checked by a finite-stack Green's function
- Log-log slope curves and asymptotic exponent/prefactor estimates
- Config-driven CLI with deterministic CSV output
"""

__version__ = "1.0"
