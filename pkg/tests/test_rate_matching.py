"""Tests for the maximum supportable arrival rates."""

import logging
import math

import numpy as np
import pytest

from src.analyzers.rate_matching import (
    invert_bandwidth,
    max_arrival,
    max_arrival_dtms,
    max_arrival_dtms_simplified,
    max_arrival_mfs,
    max_arrival_mmps,
    mmps_inversion_closed_form,
)
from src.data.models import BurstinessParam, DTMSSource, MatchMethod, MMPSSource, SourceFamily
from src.exceptions import DegenerateChainError, InvalidParameterError, NoSolutionError
from src.sources.markov_sources import effective_bandwidth
from tests.fixtures.mock_data.mock_data_objects import (
    REFERENCE_C_E,
    REFERENCE_DTMS_AVERAGE,
    REFERENCE_DTMS_LAMBDA,
    REFERENCE_MFS_AVERAGE,
    REFERENCE_MMPS_AVERAGE,
    REFERENCE_MMPS_LAMBDA,
)


class TestDTMSMatch:
    """Test the discrete-time source matching."""

    def test_reference_value(self):
        """Test lambda* ~ 2.0126 and lambda_avg* ~ 1.0063 for p11 = p22 = 0.5."""
        result = max_arrival_dtms(0.5, 0.5, REFERENCE_C_E, 1.0)

        assert result.lambda_on_star == pytest.approx(REFERENCE_DTMS_LAMBDA, abs=1e-4)
        assert result.lambda_avg_star == pytest.approx(REFERENCE_DTMS_AVERAGE, abs=1e-4)
        assert result.method is MatchMethod.CLOSED_FORM
        assert result.family is SourceFamily.DTMS
        assert abs(result.residual) < 1e-10

    def test_matches_bisection(self):
        """Test the closed form against the family-independent inversion."""
        for p11, p22 in [(0.5, 0.5), (0.9, 0.2), (0.1, 0.8), (0.3, 0.0)]:
            closed = max_arrival_dtms(p11, p22, 1.2, 0.7)
            inverted = invert_bandwidth("dtms", (p11, p22), 1.2, 0.7)
            assert closed.lambda_on_star == pytest.approx(inverted.lambda_on_star, rel=1e-8)

    def test_small_theta_precision(self):
        """Test that theta -> 0 keeps the match exact (lambda_avg* -> C_E)."""
        result = max_arrival_dtms(0.5, 0.5, 1.0, 1e-10)
        assert result.lambda_avg_star == pytest.approx(1.0, rel=1e-8)
        assert result.lambda_on_star == pytest.approx(2.0, rel=1e-8)

    def test_zero_capacity(self):
        """Test that C_E = 0 supports nothing."""
        result = max_arrival_dtms(0.5, 0.5, 0.0, 1.0)
        assert result.lambda_on_star == 0.0
        assert result.lambda_avg_star == 0.0

    def test_never_on(self):
        """Test that a source absorbed in OFF cannot be matched."""
        with pytest.raises(NoSolutionError):
            max_arrival_dtms(1.0, 0.0, 1.0, 1.0)

    def test_reducible_chain(self):
        """Test that p11 = p22 = 1 is rejected."""
        with pytest.raises(DegenerateChainError):
            max_arrival_dtms(1.0, 1.0, 1.0, 1.0)

    def test_invalid_capacity(self):
        """Test that a negative or non-finite C_E is rejected."""
        with pytest.raises(InvalidParameterError):
            max_arrival_dtms(0.5, 0.5, -1.0, 1.0)
        with pytest.raises(InvalidParameterError):
            max_arrival_dtms(0.5, 0.5, math.inf, 1.0)


class TestSimplifiedDTMS:
    """Test the burstiness form p11 = 1 - s, p22 = s."""

    @pytest.mark.parametrize("s", [0.1, 0.5, 0.9, 1.0])
    def test_matches_general_form(self, s):
        """Test agreement with the general DTMS closed form."""
        simple = max_arrival_dtms_simplified(s, 1.3, 0.8)
        general = max_arrival_dtms(1.0 - s, s, 1.3, 0.8)
        assert simple.lambda_avg_star == pytest.approx(general.lambda_avg_star, rel=1e-10)

    def test_large_exponent_branch(self):
        """Test the branch used when theta C_E > 1."""
        result = max_arrival_dtms_simplified(BurstinessParam(0.4), 3.0, 5.0)
        assert abs(result.residual) < 1e-8
        assert result.p_on == 0.4

    def test_s_one_is_constant_rate(self):
        """Test that s = 1 (always ON) supports exactly C_E."""
        assert max_arrival_dtms_simplified(1.0, 1.7, 2.0).lambda_avg_star == pytest.approx(1.7)


class TestMFSMatch:
    """Test the fluid source matching."""

    def test_reference_value(self):
        """Test lambda_avg* ~ 1.2830 for alpha = beta = 5."""
        result = max_arrival_mfs(5.0, 5.0, REFERENCE_C_E, 1.0)
        assert result.lambda_avg_star == pytest.approx(REFERENCE_MFS_AVERAGE, abs=1e-4)
        assert abs(result.residual) < 1e-10

    def test_closed_form(self):
        """Test lambda* = C (theta C + alpha + beta) / (theta C + alpha)."""
        result = max_arrival_mfs(2.0, 3.0, 1.5, 0.4)
        assert result.lambda_on_star == pytest.approx(1.5 * (0.6 + 5.0) / (0.6 + 2.0), rel=1e-14)

    def test_closed_form_matches_bisection(self):
        """Test the closed form against bisection on 50 random instances within 1e-8."""
        rng = np.random.default_rng(31)
        for _ in range(50):
            alpha, beta = rng.uniform(0.5, 20.0, 2)
            c_e = rng.uniform(0.1, 5.0)
            theta = 10.0 ** rng.uniform(-2.0, 1.0)
            closed = max_arrival_mfs(float(alpha), float(beta), float(c_e), float(theta))
            inverted = invert_bandwidth("mfs", (float(alpha), float(beta)), float(c_e), float(theta))
            assert closed.lambda_on_star == pytest.approx(inverted.lambda_on_star, rel=1e-8)

    def test_small_theta_recovers_capacity(self):
        """Test lambda_avg* -> C_E at theta = 1e-8."""
        result = max_arrival_mfs(5.0, 5.0, REFERENCE_C_E, 1e-8)
        assert result.lambda_avg_star == pytest.approx(REFERENCE_C_E, rel=1e-6)


class TestMMPSMatch:
    """Test the Poisson source matching."""

    def test_reference_value(self):
        """Test lambda* ~ 1.4933 and lambda_avg* ~ 0.7467 for alpha = beta = 5."""
        result = max_arrival_mmps(5.0, 5.0, REFERENCE_C_E, 1.0)

        assert result.lambda_on_star == pytest.approx(REFERENCE_MMPS_LAMBDA, abs=1e-4)
        assert result.lambda_avg_star == pytest.approx(REFERENCE_MMPS_AVERAGE, abs=1e-4)
        assert result.method is MatchMethod.BISECTION
        assert abs(result.residual) < 1e-10

    def test_bisection_agrees_with_inversion(self):
        """Test that bisection reproduces the algebraic inversion."""
        for alpha, beta, c_e, theta in [(5, 5, 1.4449, 1.0), (1, 9, 0.5, 0.1), (3, 2, 2.0, 3.0)]:
            result = max_arrival_mmps(alpha, beta, c_e, theta)
            expected = mmps_inversion_closed_form(alpha, beta, c_e, theta)
            assert result.lambda_on_star == pytest.approx(expected, rel=1e-9)

    def test_alternate_form_reported(self):
        """Test that the alternate closed form is attached with its own residual."""
        result = max_arrival_mmps(5.0, 5.0, REFERENCE_C_E, 1.0)
        assert result.alternate_lambda_avg is not None
        source = MMPSSource(alpha=5.0, beta=5.0, lambda_on=result.alternate_lambda_avg / 0.5)
        assert result.alternate_residual == pytest.approx(
            effective_bandwidth(source, 1.0) - REFERENCE_C_E, abs=1e-12
        )

    def test_below_fluid_at_large_theta(self):
        """Test that the Poisson source is supported at lower rate than the fluid at theta >= 1."""
        for theta in (1.0, 3.0):
            mmps = max_arrival_mmps(5.0, 5.0, 1.0, theta).lambda_avg_star
            mfs = max_arrival_mfs(5.0, 5.0, 1.0, theta).lambda_avg_star
            assert mmps < mfs

    def test_zero_capacity(self):
        """Test that C_E = 0 supports nothing."""
        result = max_arrival_mmps(5.0, 5.0, 0.0, 1.0)
        assert result.lambda_avg_star == 0.0

    def test_small_theta_recovers_capacity(self):
        """Test lambda_avg* -> C_E at theta = 1e-8."""
        result = max_arrival_mmps(5.0, 5.0, REFERENCE_C_E, 1e-8)
        assert result.lambda_avg_star == pytest.approx(REFERENCE_C_E, rel=1e-6)

    @pytest.mark.parametrize("theta", [1.0, 2.0, 5.0])
    def test_lowest_of_the_families(self, theta):
        """Test lambda_avg*(MMPS) <= DTMS and MFS at equal P_ON = 0.5 for theta >= 1."""
        mmps = max_arrival_mmps(5.0, 5.0, REFERENCE_C_E, theta).lambda_avg_star
        dtms = max_arrival_dtms(0.5, 0.5, REFERENCE_C_E, theta).lambda_avg_star
        mfs = max_arrival_mfs(5.0, 5.0, REFERENCE_C_E, theta).lambda_avg_star
        assert mmps <= dtms
        assert mmps <= mfs


class TestDispatch:
    """Test max_arrival and invert_bandwidth."""

    def test_dispatch_methods(self):
        """Test that each family uses its authoritative method."""
        assert max_arrival("dtms", (0.5, 0.5), 1.0, 1.0).method is MatchMethod.CLOSED_FORM
        assert max_arrival("mfs", (5.0, 5.0), 1.0, 1.0).method is MatchMethod.CLOSED_FORM
        assert max_arrival(SourceFamily.MMPS, (5.0, 5.0), 1.0, 1.0).method is MatchMethod.BISECTION

    def test_unknown_family(self):
        """Test that an unknown family name is rejected."""
        with pytest.raises(InvalidParameterError):
            max_arrival("pareto", (0.5, 0.5), 1.0, 1.0)

    def test_invert_bandwidth_residual(self):
        """Test that inversion meets a(theta; lambda*) = C_E."""
        result = invert_bandwidth("mfs", (1.0, 4.0), 0.9, 2.0)
        assert abs(result.residual) < 1e-10
        assert result.method is MatchMethod.BISECTION

    def test_residual_warning(self, caplog):
        """Test that a clean match logs no residual warning."""
        with caplog.at_level(logging.WARNING):
            max_arrival_dtms(0.5, 0.5, 1.0, 1.0)
        assert "residual" not in caplog.text

    def test_constant_source_match(self):
        """Test that p22 = 1 (always ON after leaving OFF) supports exactly C_E."""
        source = DTMSSource(p11=0.0, p22=1.0)
        result = max_arrival("dtms", (source.p11, source.p22), 1.25, 2.0)
        assert result.lambda_on_star == pytest.approx(1.25, rel=1e-12)
