"""Tests for fringe, visibility and HOM-dip fits."""

import math

import numpy as np
import pytest

from cpa_photonics.analysis.fitting import (
    SinusoidFit,
    fisher_from_fit,
    fit_sinusoid,
    fit_triangular,
    visibility_and_phase,
)
from cpa_photonics.analysis.metrology import PhaseCurve
from cpa_photonics.exceptions import DegenerateFitError, InvalidInputError


def _curve(phis, values):
    return PhaseCurve(phis, values, label="test")


class TestSinusoidFit:
    """Test fixed-frequency sinusoid fits."""

    @pytest.mark.parametrize("k", [1, 2])
    def test_recovers_parameters(self, k, phis):
        """Test exact recovery of amplitude, phase and offset."""
        values = 0.3 * np.cos(k * phis + 1.2) + 0.4
        fit = fit_sinusoid(_curve(phis, values), k)
        assert fit.amplitude == pytest.approx(0.3)
        assert fit.phase == pytest.approx(1.2)
        assert fit.offset == pytest.approx(0.4)
        assert fit.residual_rms < 1e-12
        assert fit.fringe_shift == pytest.approx(1.2 / k)

    def test_phase_is_wrapped(self, phis):
        """Test a negative fitted phase is reported in [0, 2pi)."""
        fit = fit_sinusoid(_curve(phis, np.cos(phis - 0.5)), 1)
        assert fit.phase == pytest.approx(2 * math.pi - 0.5)

    def test_flat_curve(self, phis):
        """Test a constant curve has zero amplitude."""
        fit = fit_sinusoid(_curve(phis, np.full(phis.size, 0.25)), 1)
        assert fit.amplitude == pytest.approx(0.0, abs=1e-12)
        assert fit.offset == pytest.approx(0.25)

    def test_too_few_points(self):
        """Test the minimum point count."""
        phis = np.linspace(0, 2 * math.pi, 3)
        with pytest.raises(InvalidInputError, match="at least 4"):
            fit_sinusoid(_curve(phis, np.cos(phis)), 1)

    def test_short_span(self):
        """Test data covering less than one period."""
        phis = np.linspace(0, math.pi, 50)
        with pytest.raises(InvalidInputError, match="period"):
            fit_sinusoid(_curve(phis, np.cos(phis)), 1)

    def test_half_span_suffices_for_noon(self):
        """Test a pi span is one full period at fringe order 2."""
        phis = np.linspace(0, math.pi, 50)
        fit = fit_sinusoid(_curve(phis, np.cos(2 * phis)), 2)
        assert fit.amplitude == pytest.approx(1.0)

    def test_invalid_order(self, phis):
        """Test fringe order below one."""
        with pytest.raises(InvalidInputError):
            fit_sinusoid(_curve(phis, np.cos(phis)), 0)


class TestVisibility:
    """Test visibility and relative phase of two ports."""

    def test_visibility(self):
        """Test a / d visibility and the relative phase."""
        s1 = SinusoidFit(amplitude=0.2, k=1, phase=0.5, offset=0.4, residual_rms=0.0)
        s2 = SinusoidFit(amplitude=0.1, k=1, phase=6.0, offset=0.4, residual_rms=0.0)
        v1, v2, relative = visibility_and_phase(s1, s2)
        assert v1 == pytest.approx(0.5)
        assert v2 == pytest.approx(0.25)
        assert relative == pytest.approx(5.5 - 2 * math.pi)

    def test_literal_visibility(self):
        """Test the (a - d) / d variant."""
        s = SinusoidFit(amplitude=0.2, k=1, phase=0.0, offset=0.4, residual_rms=0.0)
        v1, _, _ = visibility_and_phase(s, s, literal=True)
        assert v1 == pytest.approx(-0.5)

    def test_degenerate_offset(self):
        """Test a non-positive offset."""
        good = SinusoidFit(amplitude=0.2, k=1, phase=0.0, offset=0.4, residual_rms=0.0)
        bad = SinusoidFit(amplitude=0.2, k=1, phase=0.0, offset=0.0, residual_rms=0.0)
        with pytest.raises(DegenerateFitError, match="S2"):
            visibility_and_phase(good, bad)


class TestFisherFromFit:
    """Test Fisher information of fitted models."""

    def test_full_visibility_fringe(self, phis):
        """Test FI of a full-visibility fringe including its dark points."""
        fit = SinusoidFit(amplitude=0.5, k=1, phase=0.0, offset=0.5, residual_rms=0.0)
        fi = fisher_from_fit(fit, phis)
        np.testing.assert_allclose(fi.values, 0.5 * (1 - np.cos(phis)), atol=1e-9)

    def test_noon_fringe(self, phis):
        """Test FI scales with the square of the fringe order."""
        fit = SinusoidFit(amplitude=0.5, k=2, phase=0.0, offset=0.5, residual_rms=0.0)
        fi = fisher_from_fit(fit, phis)
        np.testing.assert_allclose(fi.values, 2 * (1 - np.cos(2 * phis)), atol=1e-9)


class TestTriangularFit:
    """Test HOM-dip triangular fits."""

    def test_recovers_dip(self):
        """Test exact recovery of a dip between sample points."""
        xs = np.linspace(-10, 10, 41)
        ys = 1.0 - 0.08 * np.abs(xs - 0.37)
        fit = fit_triangular(xs, ys)
        assert fit.x0 == pytest.approx(0.37, abs=1e-6)
        assert fit.a == pytest.approx(1.0, abs=1e-6)
        assert fit.b == pytest.approx(0.08, abs=1e-6)
        np.testing.assert_allclose(fit.evaluate(xs), ys, atol=1e-5)
        assert fit.residual_rms < 1e-5

    def test_peak_is_not_a_dip(self):
        """Test slopes are never negative."""
        xs = np.linspace(0, 1, 11)
        fit = fit_triangular(xs, 0.5 + 0.1 * np.abs(xs - 0.5))
        assert fit.b >= 0.0

    def test_too_few_points(self):
        """Test the minimum point count."""
        with pytest.raises(InvalidInputError, match="at least 5"):
            fit_triangular([0, 1, 2, 3], [1, 0, 0, 1])
