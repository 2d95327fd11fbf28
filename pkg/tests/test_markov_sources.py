"""Tests for the Markov arrival sources."""

import math

import numpy as np
import pytest

from src.data.models import DTMSSource, MFSSource, MMPSSource, SourceFamily
from src.exceptions import InvalidParameterError, NumericalFailureError
from src.sources.dtms import DTMSArrivals, dtms_log_spectral_ratio, dtms_steady_state_on
from src.sources.fluid import MFSArrivals, modulated_bandwidth
from src.sources.markov_sources import (
    arrival_model,
    effective_bandwidth,
    mean_rate,
    parse_family,
    source_for_p_on,
    source_parameters,
    steady_state_on,
)
from src.sources.mmps import MMPSArrivals, poisson_tilt_factor


def dtms_bandwidth_direct(p11: float, p22: float, lam: float, theta: float) -> float:
    """(1/theta) log of the spectral radius of P diag(1, e^{theta lambda})."""
    p = np.array([[p11, 1.0 - p11], [1.0 - p22, p22]])
    rho = max(abs(np.linalg.eigvals(p @ np.diag([1.0, math.exp(theta * lam)]))))
    return math.log(rho) / theta


class TestSteadyState:
    """Test stationary ON probabilities."""

    def test_dtms(self):
        """Test P_ON = (1 - p11) / (2 - p11 - p22)."""
        assert dtms_steady_state_on(0.5, 0.5) == 0.5
        assert dtms_steady_state_on(0.9, 0.6) == pytest.approx(0.2)
        assert steady_state_on(DTMSSource(p11=0.9, p22=0.6)) == pytest.approx(0.2)

    def test_modulated(self, mfs_source, mmps_source):
        """Test P_ON = alpha / (alpha + beta)."""
        assert steady_state_on(mfs_source) == 0.5
        assert steady_state_on(MMPSSource(alpha=1.0, beta=3.0)) == 0.25

    def test_mean_rate(self, dtms_source):
        """Test lambda P_ON."""
        assert mean_rate(dtms_source.with_lambda(4.0)) == 2.0


class TestDTMSBandwidth:
    """Test the discrete-time source effective bandwidth."""

    @pytest.mark.parametrize(
        "p11,p22,lam,theta",
        [(0.5, 0.5, 2.0, 1.0), (0.9, 0.3, 1.0, 0.1), (0.2, 0.95, 5.0, 2.0), (0.7, 0.0, 3.0, 0.5)],
    )
    def test_matches_eigenvalues(self, p11, p22, lam, theta):
        """Test the log-domain form against numpy eigenvalues."""
        value = effective_bandwidth(DTMSSource(p11=p11, p22=p22, lambda_on=lam), theta)
        assert value == pytest.approx(dtms_bandwidth_direct(p11, p22, lam, theta), rel=1e-10)

    def test_between_mean_and_peak(self, dtms_source):
        """Test lambda P_ON <= a(theta) <= lambda."""
        source = dtms_source.with_lambda(3.0)
        for theta in (1e-6, 0.1, 1.0, 10.0):
            value = effective_bandwidth(source, theta)
            assert 1.5 * (1 - 1e-9) <= value <= 3.0

    def test_limits(self, dtms_source):
        """Test a -> mean as theta -> 0 and a -> lambda as theta grows."""
        source = dtms_source.with_lambda(2.0)
        assert effective_bandwidth(source, 1e-9) == pytest.approx(1.0, rel=1e-6)
        assert effective_bandwidth(source, 200.0) == pytest.approx(2.0, rel=1e-2)

    def test_no_overflow(self, dtms_source):
        """Test that theta lambda far beyond exp's range stays finite."""
        value = effective_bandwidth(dtms_source.with_lambda(1e4), 10.0)
        assert math.isfinite(value)
        assert value <= 1e4

    def test_absorbing_off(self):
        """Test the source that never leaves OFF."""
        assert dtms_log_spectral_ratio(1.0, 0.0, 3.0) == -3.0
        assert effective_bandwidth(DTMSSource(p11=1.0, p22=0.0, lambda_on=2.0), 1.0) == 0.0

    def test_zero_lambda(self, dtms_source):
        """Test that an idle source needs no bandwidth."""
        assert effective_bandwidth(dtms_source.with_lambda(0.0), 1.0) == 0.0


class TestModulatedBandwidth:
    """Test the fluid and Poisson effective bandwidths."""

    def test_fluid_closed_form(self, mfs_source):
        """Test [theta lambda - k + sqrt((theta lambda - k)^2 + 4 alpha theta lambda)] / (2 theta)."""
        lam, theta, alpha, beta = 2.0, 0.8, 5.0, 5.0
        x = theta * lam
        expected = (x - alpha - beta + math.sqrt((x - alpha - beta) ** 2 + 4 * alpha * x)) / (2 * theta)
        assert effective_bandwidth(mfs_source.with_lambda(lam), theta) == pytest.approx(expected, rel=1e-12)

    def test_fluid_small_theta(self, mfs_source):
        """Test that the fluid bandwidth tends to the mean without cancellation."""
        assert effective_bandwidth(mfs_source.with_lambda(2.0), 1e-12) == pytest.approx(1.0, rel=1e-9)

    def test_fluid_capped_at_peak(self):
        """Test a(theta) <= lambda for the fluid source."""
        source = MFSSource(alpha=5.0, beta=0.001, lambda_on=2.0)
        assert effective_bandwidth(source, 100.0) <= 2.0

    def test_poisson_tilt(self, mmps_source):
        """Test that the Poisson source uses (e^theta - 1) lambda as tilt."""
        theta = 0.7
        tilt = math.expm1(theta) * 1.0
        assert effective_bandwidth(mmps_source, theta) == pytest.approx(
            modulated_bandwidth(5.0, 5.0, tilt, theta), rel=1e-14
        )

    def test_poisson_small_theta(self, mmps_source):
        """Test that the Poisson bandwidth tends to the mean lambda P_ON."""
        assert effective_bandwidth(mmps_source.with_lambda(2.0), 1e-10) == pytest.approx(1.0, rel=1e-8)

    def test_poisson_unbounded_at_large_theta(self, mmps_source):
        """Test that Poisson arrivals exceed ten times the peak rate at theta = 20."""
        assert effective_bandwidth(mmps_source, 20.0) > 10.0 * mmps_source.lambda_on

    def test_poisson_exceeds_fluid_at_large_theta(self, mfs_source, mmps_source):
        """Test that Poisson arrivals need more bandwidth than the fluid at theta >= 1."""
        for theta in (1.0, 2.0, 5.0):
            assert effective_bandwidth(mmps_source, theta) > effective_bandwidth(mfs_source, theta)

    def test_poisson_overflow(self, mmps_source):
        """Test that an unrepresentable tilt raises NumericalFailureError."""
        with pytest.raises(NumericalFailureError):
            effective_bandwidth(mmps_source, 800.0)
        with pytest.raises(NumericalFailureError):
            poisson_tilt_factor(1000.0)


class TestFamilies:
    """Test the family registry and helpers."""

    def test_arrival_model_types(self, dtms_source, mfs_source, mmps_source):
        """Test that each source maps to its model."""
        assert isinstance(arrival_model(dtms_source), DTMSArrivals)
        assert isinstance(arrival_model(mfs_source), MFSArrivals)
        assert isinstance(arrival_model(mmps_source), MMPSArrivals)

    def test_parse_family(self):
        """Test case-insensitive family names."""
        assert parse_family("MMPS") is SourceFamily.MMPS
        assert parse_family(SourceFamily.DTMS) is SourceFamily.DTMS
        with pytest.raises(InvalidParameterError):
            parse_family("pareto")

    def test_source_for_p_on(self):
        """Test building sources of a given ON probability."""
        dtms = source_for_p_on("dtms", 0.3, lambda_on=2.0)
        assert isinstance(dtms, DTMSSource)
        assert steady_state_on(dtms) == pytest.approx(0.3)
        mmps = source_for_p_on("mmps", 0.3, total_rate=10.0)
        assert source_parameters(mmps) == pytest.approx((3.0, 7.0))

    def test_peak_rate(self, mmps_source):
        """Test that the peak rate is lambda."""
        assert arrival_model(mmps_source.with_lambda(4.0)).peak_rate() == 4.0


class TestSampling:
    """Test the block samplers and the tilted log-moments."""

    @pytest.mark.parametrize("family", ["dtms", "mfs", "mmps"])
    def test_block_arrival_mean(self, family, rng):
        """Test that block arrivals average to lambda P_ON and vanish in OFF blocks."""
        source = source_for_p_on(family, 0.4, lambda_on=2.0, total_rate=1.0)
        arrivals, on = arrival_model(source).sample_block_arrivals(200_000, rng)
        assert arrivals.shape == on.shape == (200_000,)
        assert arrivals.mean() == pytest.approx(0.8, rel=0.05)
        assert ((on >= 0.0) & (on <= 1.0)).all()
        assert (arrivals[on == 0.0] == 0.0).all()

    def test_fluid_block_volume(self, mfs_source, rng):
        """Test that a fluid block carries exactly lambda times its ON time."""
        source = mfs_source.with_lambda(2.0)
        arrivals, on = arrival_model(source).sample_block_arrivals(1_000, rng, block_duration=0.5)
        np.testing.assert_allclose(arrivals, 2.0 * 0.5 * on)

    def test_dtms_path_persistence(self, rng):
        """Test that a sticky chain produces long runs."""
        source = DTMSSource(p11=0.99, p22=0.99)
        _, on = arrival_model(source).sample_block_arrivals(100_000, rng)
        switches = np.count_nonzero(on[1:] != on[:-1])
        assert switches == pytest.approx(1_000, rel=0.2)

    @pytest.mark.parametrize("family", ["dtms", "mfs", "mmps"])
    def test_tilted_log_moments(self, family, rng):
        """Test the shape and the unbiased mean of exp(log-moment) at each horizon."""
        source = source_for_p_on(family, 0.5, lambda_on=1.0, total_rate=2.0)
        model = arrival_model(source)
        theta = 0.2
        log_moments = model.sample_tilted_log_moments(theta, (10, 20), 20_000, rng)
        assert log_moments.shape == (2, 20_000)
        assert np.isfinite(log_moments).all()

        late, early = (np.log(np.mean(np.exp(row))) for row in log_moments[::-1])
        growth = (late - early) / (theta * 10)
        assert growth == pytest.approx(model.effective_bandwidth(theta), rel=0.02)
