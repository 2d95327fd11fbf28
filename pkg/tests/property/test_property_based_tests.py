"""Property-based tests for the closed forms using Hypothesis."""

import importlib.util

import pytest

if importlib.util.find_spec("hypothesis") is None:
    pytest.skip("hypothesis not available", allow_module_level=True)

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.analyzers.rate_matching import max_arrival
from src.channel.effective_capacity import effective_capacity
from src.data.models import ChannelSpec, DTMSSource, MFSSource, MMPSSource
from src.simulation.queue_sim import lindley
from src.sources.markov_sources import effective_bandwidth, mean_rate

gammas = st.floats(min_value=0.01, max_value=1000.0)
rates = st.floats(min_value=0.0, max_value=10.0)
kappas = st.floats(min_value=0.01, max_value=1e4)
thetas = st.floats(min_value=1e-3, max_value=10.0)
probabilities = st.floats(min_value=0.0, max_value=0.95)
switch_rates = st.floats(min_value=0.1, max_value=50.0)
peaks = st.floats(min_value=0.01, max_value=10.0)


@pytest.mark.property
class TestCapacityProperties:
    """Properties of the effective capacity."""

    @given(gamma=gammas, rate=rates, kappa=kappas, theta=thetas)
    @settings(max_examples=200, deadline=None)
    def test_bounded_by_mean_service(self, gamma, rate, kappa, theta):
        """Test 0 <= C_E <= R e^-psi."""
        result = effective_capacity(ChannelSpec(gamma=gamma, rate=rate, kappa=kappa), theta)
        assert 0.0 <= result.value <= result.upper_bound

    @given(gamma=gammas, rate=rates, kappa=kappas, low=thetas, high=thetas)
    @settings(max_examples=200, deadline=None)
    def test_nonincreasing_in_theta(self, gamma, rate, kappa, low, high):
        """Test that a larger exponent never raises C_E."""
        assume(low < high)
        spec = ChannelSpec(gamma=gamma, rate=rate, kappa=kappa)
        assert effective_capacity(spec, high).value <= effective_capacity(spec, low).value * (1 + 1e-9) + 1e-300


@pytest.mark.property
class TestBandwidthProperties:
    """Properties of the source effective bandwidths."""

    @given(p11=probabilities, p22=probabilities, lam=peaks, theta=thetas)
    @settings(max_examples=200, deadline=None)
    def test_dtms_between_mean_and_peak(self, p11, p22, lam, theta):
        """Test lambda P_ON <= a(theta) <= lambda."""
        source = DTMSSource(p11=p11, p22=p22, lambda_on=lam)
        value = effective_bandwidth(source, theta)
        assert mean_rate(source) - 1e-9 <= value <= lam

    @given(alpha=switch_rates, beta=switch_rates, lam=peaks, theta=thetas)
    @settings(max_examples=200, deadline=None)
    def test_poisson_above_fluid(self, alpha, beta, lam, theta):
        """Test that the Poisson source needs at least the fluid bandwidth."""
        fluid = effective_bandwidth(MFSSource(alpha=alpha, beta=beta, lambda_on=lam), theta)
        poisson = effective_bandwidth(MMPSSource(alpha=alpha, beta=beta, lambda_on=lam), theta)
        assert poisson >= fluid * (1 - 1e-9)
        assert fluid >= mean_rate(MFSSource(alpha=alpha, beta=beta, lambda_on=lam)) * (1 - 1e-9)


@pytest.mark.property
class TestMatchProperties:
    """Properties of the matching condition."""

    @given(p11=probabilities, p22=probabilities, c_e=st.floats(min_value=0.01, max_value=5.0), theta=thetas)
    @settings(max_examples=200, deadline=None)
    def test_dtms_residual(self, p11, p22, c_e, theta):
        """Test that the closed form meets a(theta; lambda*) = C_E."""
        result = max_arrival("dtms", (p11, p22), c_e, theta)
        assert abs(result.residual) <= 1e-7 * max(1.0, c_e)

    @given(alpha=switch_rates, beta=switch_rates, c_e=st.floats(min_value=0.01, max_value=5.0), theta=thetas)
    @settings(max_examples=100, deadline=None)
    def test_modulated_average_below_capacity(self, alpha, beta, c_e, theta):
        """Test that a bursty source is supported below C_E on average."""
        for family in ("mfs", "mmps"):
            result = max_arrival(family, (alpha, beta), c_e, theta)
            assert result.lambda_avg_star <= c_e * (1 + 1e-9)
            assert abs(result.residual) <= 1e-7 * max(1.0, c_e)


@pytest.mark.property
class TestLindleyProperties:
    """Properties of the backlog recursion."""

    @given(
        arrivals=st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=200),
        service=st.floats(min_value=0.0, max_value=10.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_matches_recursion(self, arrivals, service):
        """Test Q_k = max(0, Q_{k-1} + A_k - S_k) and Q >= 0."""
        a = np.array(arrivals)
        s = np.full(a.size, service)
        queue = lindley(a, s)

        backlog = 0.0
        for k in range(a.size):
            backlog = max(0.0, backlog + a[k] - s[k])
            assert queue[k] == pytest.approx(backlog, abs=1e-9)
        assert (queue >= 0).all()
