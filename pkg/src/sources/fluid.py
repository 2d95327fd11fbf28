#!/usr/bin/env python3
"""Markov fluid ON/OFF source.

A continuous-time chain switches OFF->ON at rate alpha and ON->OFF at rate
beta; while ON the source emits lambda bits per block as a fluid.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np

from ..data.models import MFSSource, MMPSSource, SourceFamily, ThetaLike, theta_value
from ..exceptions import NumericalFailureError
from ..utils.markov_paths import sample_block_on_times, sample_occupation
from ..utils.tilting import twist_generator
from .base import BaseArrivalModel

logger = logging.getLogger(__name__)


def modulated_bandwidth(alpha: float, beta: float, tilt: float, theta: float) -> float:
    """Largest eigenvalue of Q + diag(0, tilt), divided by theta.

    Evaluates [tilt - (alpha+beta) + sqrt((tilt-alpha-beta)^2 + 4 alpha tilt)] / (2 theta)
    with the subtraction-free branch when tilt < alpha + beta.
    """
    if tilt == 0.0:
        return 0.0
    if not math.isfinite(tilt):
        raise NumericalFailureError(f"tilted rate is not finite (theta={theta!r})")
    trace = tilt - (alpha + beta)
    spread = math.hypot(trace, 2.0 * math.sqrt(alpha * tilt))
    if trace <= 0.0:
        value = 2.0 * alpha * (tilt / theta) / (spread - trace)
    else:
        value = (trace + spread) / (2.0 * theta)
    if not math.isfinite(value):
        raise NumericalFailureError(f"effective bandwidth overflowed (theta={theta!r})")
    return value


class ModulatedArrivals(BaseArrivalModel):
    """Shared sampling for sources driven by a continuous-time ON/OFF chain."""

    family = SourceFamily.MFS
    source: MFSSource | MMPSSource

    def steady_state_on(self) -> float:
        """Return P_ON = alpha / (alpha + beta)."""
        return self.source.alpha / (self.source.alpha + self.source.beta)

    def effective_bandwidth(self, theta: ThetaLike) -> float:
        """Return the fluid bandwidth, capped at the peak rate lambda."""
        theta = theta_value(theta)
        lam = self.source.lambda_on
        value = modulated_bandwidth(self.source.alpha, self.source.beta, theta * lam, theta)
        return min(value, lam)

    def _tilt(self, theta: float) -> float:
        """Tilt per unit of ON time of the cumulant log E[e^{theta A(t)} | ON time]."""
        return theta * self.source.lambda_on

    def _block_on_times(
        self, blocks: int, rng: np.random.Generator, block_duration: float
    ) -> np.ndarray:
        return sample_block_on_times(self.source.alpha, self.source.beta, blocks, block_duration, rng)

    def sample_block_arrivals(
        self, blocks: int, rng: np.random.Generator, block_duration: float = 1.0
    ) -> tuple[np.ndarray, np.ndarray]:
        """Emit the fluid volume lambda * (ON time) of every block."""
        on_time = self._block_on_times(blocks, rng, block_duration)
        return self.source.lambda_on * on_time, on_time / block_duration

    def sample_tilted_log_moments(
        self, theta: float, horizons: Sequence[int], replicas: int, rng: np.random.Generator
    ) -> np.ndarray:
        """Weight the tilted ON time by the likelihood ratio of the twisted chain.

        Arrivals enter only through their conditional cumulant given the ON
        time, so only the modulating chain is sampled.
        """
        tilt = self._tilt(theta)
        twist = twist_generator(self.source.alpha, self.source.beta, tilt)
        sample = sample_occupation(
            twist.twisted_off_on,
            twist.twisted_on_off,
            horizons,
            replicas,
            rng,
            p_on=self.steady_state_on(),
        )
        return tilt * sample.on_time + twist.log_likelihood(sample, horizons)


class MFSArrivals(ModulatedArrivals):
    """Arrival model of the Markov fluid source."""

    family = SourceFamily.MFS
