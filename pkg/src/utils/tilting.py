"""Exponentially twisted two-state chains for importance sampling.

A chain tilted by e^{c X(t)}, where X(t) is the time or the number of steps
spent ON, is resampled under transitions twisted by the Perron eigenvector
of its tilted generator (or kernel). Under the twist e^{c X(t)} dP/dP~
stays nearly constant along paths, so averages of it have bounded variance
at any horizon. The likelihood ratio is computed from the sufficient
statistics of each path and is exact for any twist.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .markov_paths import OccupationSample, TransitionSample
from .numerics import perron_pair


def _log_ratio(original: float, twisted: float) -> float:
    return math.log(original / twisted) if original > 0 else 0.0


@dataclass(frozen=True)
class TwistedGenerator:
    """Original and twisted rates of a continuous-time ON/OFF chain."""

    rate_off_on: float
    rate_on_off: float
    twisted_off_on: float
    twisted_on_off: float

    def log_likelihood(self, sample: OccupationSample, horizons: Sequence[float]) -> np.ndarray:
        """Return log dP/dP~ of each path sampled under the twisted rates, per horizon."""
        times = np.asarray(horizons, dtype=float)[:, None]
        off_time = times - sample.on_time
        value = -(self.rate_off_on - self.twisted_off_on) * off_time
        value = value - (self.rate_on_off - self.twisted_on_off) * sample.on_time
        value = value + sample.jumps_on * _log_ratio(self.rate_off_on, self.twisted_off_on)
        return value + sample.jumps_off * _log_ratio(self.rate_on_off, self.twisted_on_off)


def twist_generator(rate_off_on: float, rate_on_off: float, tilt: float) -> TwistedGenerator:
    """Twist a chain by the Perron vector h of Q + diag(0, tilt).

    The twisted rates are q_ij h_j / h_i.

    Args:
        rate_off_on: Transition rate OFF -> ON.
        rate_on_off: Transition rate ON -> OFF.
        tilt: Exponential tilt per unit of ON time.

    Returns:
        TwistedGenerator holding both sets of rates.

    Raises:
        NumericalFailureError: If the tilted generator has no positive Perron vector.
    """
    matrix = np.array([[-rate_off_on, rate_off_on], [rate_on_off, tilt - rate_on_off]])
    _, vector = perron_pair(matrix)
    ratio = float(vector[1] / vector[0])
    return TwistedGenerator(
        rate_off_on=rate_off_on,
        rate_on_off=rate_on_off,
        twisted_off_on=rate_off_on * ratio,
        twisted_on_off=rate_on_off / ratio,
    )


@dataclass(frozen=True)
class TwistedKernel:
    """Original and twisted transition matrices of a discrete-time ON/OFF chain."""

    kernel: np.ndarray
    twisted: np.ndarray

    @property
    def stay_off(self) -> float:
        """Twisted probability of remaining OFF."""
        return float(self.twisted[0, 0])

    @property
    def stay_on(self) -> float:
        """Twisted probability of remaining ON."""
        return float(self.twisted[1, 1])

    def log_likelihood(self, sample: TransitionSample) -> np.ndarray:
        """Return log dP/dP~ of each path sampled under the twisted kernel, per horizon."""
        with np.errstate(divide="ignore", invalid="ignore"):
            log_ratio = np.where(self.kernel > 0, np.log(self.kernel) - np.log(self.twisted), 0.0)
        return np.einsum("ij,hijr->hr", log_ratio, sample.transitions)


def twist_kernel(stay_off: float, stay_on: float, tilt: float) -> TwistedKernel:
    """Twist a kernel P by the Perron vector v of P diag(1, e^tilt).

    The twisted kernel is P_ij w_j v_j / (rho v_i) with w = (1, e^tilt). The
    tilted kernel is rescaled by e^{-tilt} first, so large tilts do not overflow.
    """
    kernel = np.array([[stay_off, 1.0 - stay_off], [1.0 - stay_on, stay_on]])
    weights = np.array([math.exp(-tilt), 1.0]) if tilt >= 0 else np.array([1.0, math.exp(tilt)])
    root, vector = perron_pair(kernel * weights)
    twisted = kernel * weights * vector[None, :] / (root * vector[:, None])
    return TwistedKernel(kernel=kernel, twisted=twisted)
