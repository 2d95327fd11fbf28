#!/usr/bin/env python3
"""Markov-modulated Poisson source.

Bits arrive as a Poisson process of intensity lambda while the modulating
chain is ON. Over one block the Poisson tilt is (e^theta - 1) lambda, so the
effective bandwidth has the fluid form with theta lambda replaced by that
tilt and, unlike the fluid source, grows without bound in theta.

The tilt is per unit of ON time; the simulator draws Poisson(lambda * ON time)
bits in each block.
"""

import logging
import math

import numpy as np

from ..data.models import MMPSSource, SourceFamily, ThetaLike, theta_value
from ..exceptions import NumericalFailureError
from .fluid import ModulatedArrivals, modulated_bandwidth

logger = logging.getLogger(__name__)


def poisson_tilt_factor(theta: float) -> float:
    """Return e^theta - 1, raising NumericalFailureError where it overflows."""
    try:
        return math.expm1(theta)
    except OverflowError as e:
        raise NumericalFailureError(f"Poisson tilt e^theta - 1 overflows at theta={theta!r}") from e


class MMPSArrivals(ModulatedArrivals):
    """Arrival model of the Markov-modulated Poisson source."""

    family = SourceFamily.MMPS
    source: MMPSSource

    def effective_bandwidth(self, theta: ThetaLike) -> float:
        """Return a(theta) with the Poisson tilt (e^theta - 1) lambda."""
        theta = theta_value(theta)
        lam = self.source.lambda_on
        if lam == 0.0:
            return 0.0
        return modulated_bandwidth(self.source.alpha, self.source.beta, self._tilt(theta), theta)

    def _tilt(self, theta: float) -> float:
        """Return the Poisson tilt (e^theta - 1) lambda per unit of ON time."""
        return poisson_tilt_factor(theta) * self.source.lambda_on

    def sample_block_arrivals(
        self, blocks: int, rng: np.random.Generator, block_duration: float = 1.0
    ) -> tuple[np.ndarray, np.ndarray]:
        """Draw Poisson(lambda * ON time) bits in every block."""
        on_time = self._block_on_times(blocks, rng, block_duration)
        counts = rng.poisson(self.source.lambda_on * on_time)
        return counts.astype(float), on_time / block_duration
