"""Base interfaces for Markov arrival models.

Each concrete model wraps one immutable source dataclass and provides its
closed-form effective bandwidth, stationary statistics and samplers for the
simulation layer.
"""

from abc import ABC, abstractmethod
from collections.abc import Sequence

import numpy as np

from ..data.models import SourceFamily, SourceModel, ThetaLike


class BaseArrivalModel(ABC):
    """Abstract base class for all ON/OFF arrival models.

    This interface establishes the contract shared by the discrete-time,
    fluid and Poisson sources.
    """

    family: SourceFamily

    def __init__(self, source: SourceModel):
        """Initialize the model.

        Args:
            source: Validated source parameters.
        """
        self.source = source

    @abstractmethod
    def steady_state_on(self) -> float:
        """Return the stationary ON probability P_ON."""

    @abstractmethod
    def effective_bandwidth(self, theta: ThetaLike) -> float:
        """Return the effective bandwidth a(theta) in bits/block.

        Args:
            theta: QoS exponent.

        Returns:
            Minimum constant service rate supporting the source at exponent theta.

        Raises:
            NumericalFailureError: If the value is not representable.
        """

    @abstractmethod
    def sample_block_arrivals(
        self, blocks: int, rng: np.random.Generator, block_duration: float = 1.0
    ) -> tuple[np.ndarray, np.ndarray]:
        """Sample per-block arrivals for the slotted queue simulator.

        Args:
            blocks: Number of blocks.
            rng: Random generator.
            block_duration: Block length T.

        Returns:
            Tuple of (arrived bits per block, fraction of each block spent ON).
        """

    @abstractmethod
    def sample_tilted_log_moments(
        self, theta: float, horizons: Sequence[int], replicas: int, rng: np.random.Generator
    ) -> np.ndarray:
        """Sample log(e^{theta A(t)} dP/dP~) under the exponentially twisted source.

        For each horizon t the mean of the exponentiated values over replicas
        is an unbiased estimate of E[e^{theta A(t)}] from the stationary start.

        Args:
            theta: QoS exponent.
            horizons: Nondecreasing observation windows in blocks.
            replicas: Number of independent paths.
            rng: Random generator.

        Returns:
            Array of shape (len(horizons), replicas).
        """

    def mean_rate(self) -> float:
        """Return the average arrival rate lambda P_ON."""
        return self.source.lambda_on * self.steady_state_on()

    def peak_rate(self) -> float:
        """Return the ON-state rate lambda."""
        return self.source.lambda_on
