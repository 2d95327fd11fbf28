#!/usr/bin/env python3
"""Throughput-optimal fixed transmission rate.

Bounded golden-section maximization of R -> C_E(gamma, theta, R, kappa) is the
primary search. The first-order condition is kept as an independent check,
both as a residual and as a root found by Brent's method.
"""

import logging
import math

import numpy as np

from ..channel.effective_capacity import effective_capacity_value
from ..channel.markov_channel import LN2, outage_threshold
from ..config import ChannelDefaults, SearchBounds, Tolerances
from ..data.models import OptimumRate, ThetaLike, theta_value
from ..exceptions import BracketFailureError, DegenerateOptimumError, InvalidParameterError
from ..utils.numerics import find_root, golden_section_maximize

logger = logging.getLogger(__name__)


def max_search_rate(gamma: float) -> float:
    """Return R_max = log2(1 + gamma z_hi), beyond which P_ON < 1e-12."""
    if not gamma > 0:
        raise InvalidParameterError("must be positive", "gamma", gamma)
    return math.log1p(gamma * ChannelDefaults.Z_HI) / LN2


def _chain_terms(gamma: float, kappa: float, theta: float, r: float) -> tuple[float, float, float]:
    """Return (psi, nu, xi) at rate r."""
    psi = outage_threshold(gamma, r)
    nu = kappa * math.exp(-psi)
    mu = -kappa * math.expm1(-psi)
    theta_r = theta * r
    xi = math.hypot(theta_r - kappa, 2.0 * math.sqrt(mu * theta_r))
    return psi, nu, xi


def foc_residual(gamma: float, kappa: float, theta: ThetaLike, r: float) -> float:
    """Evaluate the first-order optimality residual at rate r.

    The residual is gamma xi - gamma (theta r + kappa) + 2 gamma nu -
    2 r nu ln(2) 2^r. The difference gamma (xi - theta r - kappa) is rewritten
    as -4 gamma nu theta r / (xi + theta r + kappa) so it does not cancel.

    Args:
        gamma: Linear average SNR.
        kappa: Channel memory decay rate.
        theta: QoS exponent.
        r: Transmission rate (bits/block), r > 0.

    Returns:
        Residual whose sign is the sign of dC_E/dR.
    """
    theta = theta_value(theta)
    if not r > 0:
        raise InvalidParameterError("must be positive", "r", r)
    psi, nu, xi = _chain_terms(gamma, kappa, theta, r)
    theta_r = theta * r
    gap = -4.0 * gamma * nu * theta_r / (xi + theta_r + kappa)
    rate_term = 2.0 * r * LN2 * kappa * math.exp(r * LN2 - psi)
    return gap + 2.0 * gamma * nu - rate_term


def capacity_rate_derivative(gamma: float, kappa: float, theta: ThetaLike, r: float) -> float:
    """Return dC_E/dR = foc_residual / (2 gamma xi)."""
    theta = theta_value(theta)
    _, _, xi = _chain_terms(gamma, kappa, theta, r)
    return foc_residual(gamma, kappa, theta, r) / (2.0 * gamma * xi)


def fixed_point_rate(gamma: float, kappa: float, theta: ThetaLike, r: float) -> float:
    """Evaluate R = gamma (xi - kappa + 2 nu) / (gamma theta + 2 nu ln(2) 2^R) at r.

    At an interior optimum the map returns its argument.
    """
    theta = theta_value(theta)
    psi, nu, xi = _chain_terms(gamma, kappa, theta, r)
    denominator = gamma * theta + 2.0 * LN2 * kappa * math.exp(r * LN2 - psi)
    return gamma * (xi - kappa + 2.0 * nu) / denominator


def _rate_grid(gamma: float, points: int) -> np.ndarray:
    r_max = max_search_rate(gamma)
    return np.linspace(r_max / points, r_max, points)


def foc_sign_changes(
    gamma: float, kappa: float, theta: ThetaLike, points: int = SearchBounds.GRID_POINTS
) -> int:
    """Count sign changes of the first-order residual on a grid over (0, R_max]."""
    theta = theta_value(theta)
    signs = np.sign([foc_residual(gamma, kappa, theta, float(r)) for r in _rate_grid(gamma, points)])
    signs = signs[signs != 0]
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    if changes != 1:
        logger.warning(
            f"First-order residual changes sign {changes} times "
            f"(gamma={gamma:.6g}, kappa={kappa:.6g}, theta={theta:.6g})"
        )
    return changes


def foc_root(gamma: float, kappa: float, theta: ThetaLike) -> float:
    """Locate the first + to - sign change of the first-order residual.

    Raises:
        BracketFailureError: If the residual never turns negative on (0, R_max].
    """
    theta = theta_value(theta)
    grid = _rate_grid(gamma, SearchBounds.GRID_POINTS)
    values = [foc_residual(gamma, kappa, theta, float(r)) for r in grid]

    lower, f_lower = float(grid[0]) * 1e-6, foc_residual(gamma, kappa, theta, float(grid[0]) * 1e-6)
    for r, value in zip(grid, values, strict=True):
        if f_lower > 0 >= value:
            return find_root(
                lambda x: foc_residual(gamma, kappa, theta, x),
                lower,
                float(r),
                xtol=Tolerances.GOLDEN_SECTION_XTOL * 1e-3,
            )
        lower, f_lower = float(r), value

    raise BracketFailureError(
        "first-order residual has no sign change", float(grid[0]), float(grid[-1]), values[0], values[-1]
    )


def optimize_rate(gamma: float, kappa: float, theta: ThetaLike) -> OptimumRate:
    """Find the fixed rate maximizing the effective capacity.

    Golden-section search runs on [0, R_max]. A dense grid certifies the
    result; if the grid finds a better point the search is repeated around
    it and the result is flagged as not unimodal.

    Args:
        gamma: Linear average SNR.
        kappa: Channel memory decay rate.
        theta: QoS exponent.

    Returns:
        OptimumRate with the first-order residual at R*.

    Raises:
        DegenerateOptimumError: If C_E(R*) <= 1e-12.
    """
    theta = theta_value(theta)
    r_max = max_search_rate(gamma)

    def objective(r: float) -> float:
        return effective_capacity_value(gamma, r, kappa, theta)

    search = golden_section_maximize(objective, 0.0, r_max)
    r_star, c_star = search.x, search.fx
    method, unimodal = "golden_section", True

    grid = np.linspace(0.0, r_max, SearchBounds.GRID_POINTS + 1)
    grid_values = np.array([objective(float(r)) for r in grid])
    best = int(np.argmax(grid_values))
    if grid_values[best] > c_star * (1.0 + 1e-12):
        unimodal = False
        method = "grid+golden_section"
        lower = float(grid[max(best - 1, 0)])
        upper = float(grid[min(best + 1, grid.size - 1)])
        logger.warning(
            f"Effective capacity is not unimodal on [0, {r_max:.6g}] "
            f"(gamma={gamma:.6g}, kappa={kappa:.6g}, theta={theta:.6g}); refining around R={grid[best]:.6g}"
        )
        search = golden_section_maximize(objective, lower, upper)
        r_star, c_star = search.x, search.fx

    if c_star <= Tolerances.DEGENERATE_CAPACITY:
        raise DegenerateOptimumError("effective capacity vanishes at the best rate", r_star, c_star)

    residual = foc_residual(gamma, kappa, theta, r_star) if r_star > 0 else math.nan
    logger.info(
        f"Optimal rate R*={r_star:.9g} with C_E*={c_star:.9g} "
        f"(gamma={gamma:.6g}, kappa={kappa:.6g}, theta={theta:.6g})"
    )
    return OptimumRate(
        r_star=r_star,
        c_e_star=c_star,
        foc_residual=residual,
        bracket=(0.0, r_max),
        method=method,
        unimodal=unimodal,
        iterations=search.iterations,
        trace=tuple(search.trace),
    )
