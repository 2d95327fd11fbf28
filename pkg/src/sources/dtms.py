#!/usr/bin/env python3
"""Discrete-time Markov ON/OFF source.

The source stays OFF with probability p11 and ON with probability p22 per
block and emits lambda bits in every ON block. Its effective bandwidth is
(1/theta) log of the spectral radius of P diag(1, e^{theta lambda}).
"""

import logging
import math
from collections.abc import Sequence

import numpy as np

from ..data.models import DTMSSource, SourceFamily, ThetaLike, theta_value
from ..utils.markov_paths import sample_discrete_path, sample_transitions
from ..utils.tilting import twist_kernel
from .base import BaseArrivalModel

logger = logging.getLogger(__name__)


def dtms_steady_state_on(p11: float, p22: float) -> float:
    """Return P_ON = (1 - p11) / (2 - p11 - p22)."""
    return (1.0 - p11) / (2.0 - p11 - p22)


def dtms_log_spectral_ratio(p11: float, p22: float, x: float) -> float:
    """Return log(rho / e^x) for the chain tilted by e^x in the ON state.

    Working with the scaled radius keeps every exponential at e^{-x}, so the
    evaluation stays in the log domain for any theta * lambda.
    """
    if p22 == 0.0:
        if p11 == 1.0:
            return -x
        root_u = math.exp(-0.5 * x)
        scaled = 0.5 * (p11 * root_u + math.sqrt(p11 * p11 * root_u * root_u + 4.0 * (1.0 - p11)))
        return -0.5 * x + math.log(scaled)

    u = math.exp(-x)
    b = p11 * u + p22
    cross = (1.0 - p11) * (1.0 - p22) * u
    root = 0.5 * (b + math.hypot(p11 * u - p22, 2.0 * math.sqrt(cross)))
    return math.log(root)


class DTMSArrivals(BaseArrivalModel):
    """Arrival model of the discrete-time Markov source."""

    family = SourceFamily.DTMS
    source: DTMSSource

    def steady_state_on(self) -> float:
        """Return the stationary ON probability of the chain."""
        return dtms_steady_state_on(self.source.p11, self.source.p22)

    def effective_bandwidth(self, theta: ThetaLike) -> float:
        """Return a(theta) = lambda + (1/theta) log(rho e^{-theta lambda})."""
        theta = theta_value(theta)
        lam = self.source.lambda_on
        if lam == 0.0:
            return 0.0
        x = theta * lam
        value = lam + dtms_log_spectral_ratio(self.source.p11, self.source.p22, x) / theta
        return min(max(value, 0.0), lam)

    def sample_block_arrivals(
        self, blocks: int, rng: np.random.Generator, block_duration: float = 1.0
    ) -> tuple[np.ndarray, np.ndarray]:
        """Sample lambda T bits in each ON block of the chain."""
        on = sample_discrete_path(self.source.p11, self.source.p22, blocks, rng)
        return on * (self.source.lambda_on * block_duration), on.astype(float)

    def sample_tilted_log_moments(
        self, theta: float, horizons: Sequence[int], replicas: int, rng: np.random.Generator
    ) -> np.ndarray:
        """Weight theta lambda (ON steps) by the likelihood ratio of the twisted kernel."""
        x = theta * self.source.lambda_on
        twist = twist_kernel(self.source.p11, self.source.p22, x)
        sample = sample_transitions(
            twist.stay_off, twist.stay_on, horizons, replicas, rng, p_on=self.steady_state_on()
        )
        return x * sample.on_steps + twist.log_likelihood(sample)
