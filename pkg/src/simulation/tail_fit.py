"""Empirical tail probabilities and log-linear decay fits."""

import logging
import math

import numpy as np

from ..config import SimulationDefaults

logger = logging.getLogger(__name__)


def empirical_tail(
    levels: np.ndarray, weights: np.ndarray | None, max_level: int
) -> tuple[np.ndarray, np.ndarray]:
    """Return the weighted Pr{X >= d} and raw counts for integer d = 0..max_level.

    Args:
        levels: Non-negative integer observations.
        weights: Optional non-negative weight per observation.
        max_level: Largest level reported.

    Returns:
        Tuple of (probabilities, unweighted counts of observations >= d).
    """
    clipped = np.minimum(np.asarray(levels, dtype=np.int64), max_level + 1)
    counts = np.bincount(clipped, minlength=max_level + 2)
    at_least = np.cumsum(counts[::-1])[::-1][: max_level + 1]

    if weights is None:
        total = float(clipped.size)
        mass = at_least.astype(float)
    else:
        weighted = np.bincount(clipped, weights=weights, minlength=max_level + 2)
        mass = np.cumsum(weighted[::-1])[::-1][: max_level + 1]
        total = float(np.sum(weights))

    if total <= 0:
        return np.zeros(max_level + 1), at_least
    return np.clip(mass / total, 0.0, 1.0), at_least


def fit_tail_decay(
    tail: np.ndarray,
    counts: np.ndarray,
    min_count: int = SimulationDefaults.TAIL_MIN_COUNT,
    band: float = SimulationDefaults.TAIL_BAND,
) -> float:
    """Fit the decay rate of a tail by least squares on its logarithm.

    Only levels with at least ``min_count`` samples and probability at most
    ``band`` enter the fit, which keeps out both the body of the
    distribution and the noisy far tail.

    Args:
        tail: Tail probabilities at levels 0, 1, 2, ...
        counts: Number of samples at or beyond each level.
        min_count: Minimum sample count per level.
        band: Largest probability used.

    Returns:
        Minus the fitted slope, or NaN with fewer than two usable levels.
    """
    tail = np.asarray(tail, dtype=float)
    levels = np.arange(tail.size, dtype=float)
    usable = (np.asarray(counts) >= min_count) & (tail <= band) & (tail > 0)
    if np.count_nonzero(usable) < 2:
        logger.debug("Too few tail levels in the fitting band")
        return math.nan
    slope, _ = np.polyfit(levels[usable], np.log(tail[usable]), 1)
    return float(-slope)


def trim_tail(tail: np.ndarray) -> int:
    """Return the number of leading levels to keep, ending at the first zero."""
    zeros = np.flatnonzero(np.asarray(tail) <= 0)
    return int(zeros[0]) + 1 if zeros.size else int(len(tail))
