#!/usr/bin/env python3
"""Effective capacity of the fixed-rate ON/OFF service process.

The closed form is C_E = (1 / 2 theta) [theta R + kappa - xi] with
xi = sqrt((theta R + kappa)^2 - 4 nu theta R). It is evaluated as the
equivalent subtraction-free ratio 2 nu R / (theta R + kappa + xi), and xi
itself as hypot(theta R - kappa, 2 sqrt(mu theta R)), so neither small theta
nor large kappa loses digits.
"""

import logging
import math

from ..data.models import ChannelSpec, EffectiveCapacityResult, ThetaLike, theta_value
from .markov_channel import derive_chain, discretize

logger = logging.getLogger(__name__)


def _capacity_terms(nu: float, mu: float, rate: float, theta: float) -> tuple[float, float]:
    """Return (C_E, xi) for chain rates nu, mu at rate R and exponent theta."""
    kappa = nu + mu
    theta_rate = theta * rate
    xi = math.hypot(theta_rate - kappa, 2.0 * math.sqrt(mu * theta_rate))
    if rate == 0.0 or nu == 0.0:
        return 0.0, xi
    return 2.0 * nu * rate / (theta_rate + kappa + xi), xi


def effective_capacity(spec: ChannelSpec, theta: ThetaLike) -> EffectiveCapacityResult:
    """Compute the closed-form effective capacity of a fixed-rate link.

    Args:
        spec: Channel SNR, fixed rate and memory decay rate.
        theta: QoS exponent (strictly positive).

    Returns:
        C_E in bits/block together with xi and the high-memory bound R e^-psi.
    """
    theta = theta_value(theta)
    chain = derive_chain(spec)
    value, xi = _capacity_terms(chain.nu, chain.mu, spec.rate, theta)
    upper_bound = spec.rate * chain.p_on
    value = min(value, upper_bound)
    logger.debug(
        f"C_E(gamma={spec.gamma:.6g}, R={spec.rate:.6g}, kappa={spec.kappa:.6g}, "
        f"theta={theta:.6g}) = {value:.12g}"
    )
    return EffectiveCapacityResult(value=value, xi=xi, upper_bound=upper_bound, theta=theta)


def effective_capacity_value(gamma: float, rate: float, kappa: float, theta: float) -> float:
    """Scalar shortcut of effective_capacity used inside searches and sweeps."""
    return effective_capacity(ChannelSpec(gamma=gamma, rate=rate, kappa=kappa), theta).value


def capacity_upper_bound(spec: ChannelSpec) -> float:
    """Return the infinite-memory-decay limit R e^-psi (the mean service rate)."""
    return spec.rate * derive_chain(spec).p_on


def capacity_lower_limit(spec: ChannelSpec, theta: ThetaLike) -> float:
    """Return the kappa -> 0 limit of the effective capacity, which is zero."""
    theta_value(theta)
    return 0.0


def block_effective_capacity(
    spec: ChannelSpec, theta: ThetaLike, block_duration: float = 1.0
) -> float:
    """Effective capacity of the block-sampled service.

    A block of duration T serves R T bits when the chain is ON at its start.
    The result is -log(rho) / (theta T), where rho is the spectral radius of
    the kernel tilted by exp(-theta R T) in the ON state. This is the
    theoretical counterpart of the slotted queue simulator.

    Args:
        spec: Channel specification.
        theta: QoS exponent.
        block_duration: Block length T.

    Returns:
        Effective capacity in bits per unit time.
    """
    theta = theta_value(theta)
    if spec.rate == 0.0:
        return 0.0

    kernel = discretize(derive_chain(spec), block_duration)
    tilt = math.exp(-theta * spec.rate * block_duration)
    stay_off = kernel.p_off_off
    stay_on = kernel.p_on_on * tilt
    cross = kernel.p_off_on * kernel.p_on_off * tilt

    rho = 0.5 * (stay_off + stay_on + math.hypot(stay_off - stay_on, 2.0 * math.sqrt(cross)))
    if rho <= 0.0:
        return 0.0
    return max(0.0, -math.log(rho) / (theta * block_duration))
