#!/usr/bin/env python3
"""
BANDEDGE Exponent Tests
=======================

Log-log sampling, slope curves and the asymptotic estimators on synthetic
power laws.

Run with: pytest tests/test_exponent.py -v
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.photonic.errors import DomainError, SampleCountError, UnconvergedEstimateError
from app.photonic.exponent import (
    ExponentEstimate,
    LogLogSample,
    SlopePoint,
    apparent_exponent,
    estimate_eta,
    prefactor_K,
    sample_loglog,
    slope_curve,
)
from tests.conftest import LOWER_EDGE

SYNTHETIC_GRID = np.linspace(-1.0, -4.0, 31)


def power_law(omega_c, eta, K):
    return lambda omega: K * abs(omega_c - omega) ** eta


def manual_samples(z_values, y_values):
    return [LogLogSample(0.0, z, 10 ** z, 1.0, 10 ** y, y) for z, y in zip(z_values, y_values)]


# =============================================================================
# Sampling
# =============================================================================
class TestSampling:
    """sample_loglog on pure functions."""

    def test_frequency_below_edge(self):
        """omega = omega_c (1 - 10^z) below a lower edge."""
        samples = sample_loglog(power_law(LOWER_EDGE, -0.5, 1.0), LOWER_EDGE, [-3.0])
        assert samples[0].omega == LOWER_EDGE * (1.0 - 10.0 ** -3.0)
        assert samples[0].u == pytest.approx(1e-3)

    def test_frequency_above_upper_edge(self):
        """omega = omega_c (1 + 10^z) above an upper edge."""
        samples = sample_loglog(lambda omega: 1.0, 3.8, [-2.0], side="upper")
        assert samples[0].omega == pytest.approx(3.8 * 1.01)

    def test_exact_power_law_line(self):
        """y(z) = -0.5 (z + log10 omega_c) for rho = |omega_c - omega|^(-1/2)."""
        samples = sample_loglog(power_law(LOWER_EDGE, -0.5, 1.0), LOWER_EDGE, SYNTHETIC_GRID)
        for s in samples:
            assert s.valid
            assert s.y == pytest.approx(-0.5 * (s.z + math.log10(LOWER_EDGE)), abs=1e-10)
            assert s.y == pytest.approx(math.log10(s.rho))

    def test_out_of_band_sample_flagged(self):
        """A DomainError from the evaluator marks the sample invalid, not fatal."""
        def rho(omega):
            if omega < 2.0:
                raise DomainError("outside band")
            return 1.0

        samples = sample_loglog(rho, 2.4, [-0.2, -2.0])
        assert [s.valid for s in samples] == [False, True]
        assert math.isnan(samples[0].y)

    def test_nonnegative_z_rejected(self):
        """z >= 0 and omega_c <= 0 are domain errors."""
        with pytest.raises(DomainError):
            sample_loglog(lambda omega: 1.0, 2.0, [-1.0, 0.0])
        with pytest.raises(DomainError):
            sample_loglog(lambda omega: 1.0, -2.0, [-1.0])


# =============================================================================
# Slope curves
# =============================================================================
class TestSlopeCurve:
    """Finite-difference slopes of y(z)."""

    def test_exact_line(self):
        """A straight line has a constant slope, even on an uneven grid."""
        z = np.array([-1.0, -1.5, -2.7, -3.0, -4.2])
        slopes = slope_curve(manual_samples(z, -0.5 * z + 7.0))
        assert all(p.dydz == pytest.approx(-0.5, abs=1e-12) for p in slopes)

    def test_quadratic_interior_exact(self):
        """Centred differences are exact for y = z^2 on a uniform grid."""
        z = np.linspace(-1.0, -3.0, 21)
        slopes = slope_curve(manual_samples(z, z ** 2))
        for p in slopes[1:-1]:
            assert p.dydz == pytest.approx(2 * p.z, abs=1e-10)

    def test_invalid_samples_skipped(self):
        """Invalid samples do not enter the slope curve."""
        z = np.array([-1.0, -2.0, -3.0, -4.0])
        samples = manual_samples(z, -0.5 * z)
        samples[1] = LogLogSample(0.0, -2.0, 0.01, 1.0, math.nan, math.nan, valid=False)
        assert [p.z for p in slope_curve(samples)] == [-1.0, -3.0, -4.0]

    def test_too_few_samples(self):
        """Fewer than three valid samples raise SampleCountError."""
        with pytest.raises(SampleCountError):
            slope_curve(manual_samples([-1.0, -2.0], [0.5, 1.0]))

    def test_repeated_z_rejected(self):
        """Duplicate z values cannot be differentiated."""
        with pytest.raises(SampleCountError):
            slope_curve(manual_samples([-1.0, -2.0, -2.0], [0.5, 1.0, 1.0]))


# =============================================================================
# Estimators
# =============================================================================
class TestEstimators:
    """eta_hat, convergence flag, z_converged and K_hat."""

    SLOPES = [SlopePoint(-1.0, -0.3), SlopePoint(-2.0, -0.45), SlopePoint(-3.0, -0.49), SlopePoint(-4.0, -0.5)]

    def test_window_comparison(self):
        """eta_hat is compared with the slope one decade further out."""
        estimate = estimate_eta(self.SLOPES, tol=0.02, window=1.0)
        assert estimate.eta_hat == -0.5
        assert estimate.converged
        assert estimate.z_converged == -3.0
        assert estimate.K_hat is None

    def test_tighter_tolerance_not_converged(self):
        """A 0.005 tolerance rejects the same curve."""
        estimate = estimate_eta(self.SLOPES, tol=0.005, window=1.0)
        assert not estimate.converged
        assert estimate.z_converged == -4.0

    def test_wide_window_sees_drift(self):
        """Comparing against z = -2 exposes a drift the adjacent slopes hide."""
        assert estimate_eta(self.SLOPES, tol=0.02, window=None).converged
        assert not estimate_eta(self.SLOPES, tol=0.02, window=2.0).converged

    def test_unsorted_input_is_ordered(self):
        """Slopes are sorted by z before estimating."""
        estimate = estimate_eta(list(reversed(self.SLOPES)), tol=0.02)
        assert estimate.eta_hat == -0.5

    @settings(max_examples=50, deadline=None)
    @given(
        eta=st.floats(min_value=-1.0, max_value=1.0),
        K=st.floats(min_value=1e-3, max_value=100.0),
    )
    def test_synthetic_power_law_exactness(self, eta, K):
        """eta_hat within 1e-10 and K_hat within 1e-6 on exact power laws."""
        samples = sample_loglog(power_law(LOWER_EDGE, eta, K), LOWER_EDGE, SYNTHETIC_GRID)
        estimate = estimate_eta(slope_curve(samples), tol=0.02)
        assert estimate.eta_hat == pytest.approx(eta, abs=1e-10)
        assert estimate.converged
        assert estimate.z_converged == pytest.approx(-1.0)
        assert prefactor_K(samples, estimate, LOWER_EDGE) == pytest.approx(K, rel=1e-6)

    def test_three_dimensional_form(self):
        """The estimator is symmetric: a +1/2 law gives +1/2."""
        samples = sample_loglog(power_law(LOWER_EDGE, 0.5, 1.0), LOWER_EDGE, SYNTHETIC_GRID)
        assert estimate_eta(slope_curve(samples)).eta_hat == pytest.approx(0.5, abs=1e-10)

    def test_prefactor_three(self):
        """K = 3 is recovered from an exact -1/2 law."""
        samples = sample_loglog(power_law(LOWER_EDGE, -0.5, 3.0), LOWER_EDGE, SYNTHETIC_GRID)
        estimate = estimate_eta(slope_curve(samples))
        assert prefactor_K(samples, estimate, LOWER_EDGE) == pytest.approx(3.0, abs=1e-6)

    def test_prefactor_needs_convergence(self):
        """An unconverged estimate has no prefactor."""
        estimate = ExponentEstimate(x=0.0, eta_hat=-0.4, K_hat=None, z_converged=-4.0, converged=False)
        with pytest.raises(UnconvergedEstimateError):
            prefactor_K([], estimate, LOWER_EDGE)

    def test_apparent_exponent_on_exact_law(self):
        """A least-squares fit of an exact law returns its exponent."""
        samples = sample_loglog(power_law(LOWER_EDGE, -0.5, 2.0), LOWER_EDGE, SYNTHETIC_GRID)
        assert apparent_exponent(samples, z_hi=-1.0, z_lo=-2.0) == pytest.approx(-0.5, abs=1e-10)

    def test_apparent_exponent_window_validation(self):
        """Inverted or empty windows are rejected."""
        samples = sample_loglog(power_law(LOWER_EDGE, -0.5, 2.0), LOWER_EDGE, SYNTHETIC_GRID)
        with pytest.raises(DomainError):
            apparent_exponent(samples, z_hi=-3.0, z_lo=-2.0)
        with pytest.raises(SampleCountError):
            apparent_exponent(samples, z_hi=-5.0, z_lo=-6.0)
