#!/usr/bin/env python3
"""Two-state Markov model of a fixed-rate link over Rayleigh block fading.

The channel gain z is unit-mean exponential. A block transmitted at rate R is
ON when log2(1 + gamma z) > R, i.e. when z exceeds the outage threshold
psi = (2^R - 1) / gamma, and OFF otherwise (a block with C = R exactly is OFF).
Channel memory enters through the decay rate kappa = nu + mu of the
continuous-time chain.

With kappa = 50 and T = 1 the block-sampled chain is practically memoryless
(exp(-50) ~ 2e-22). Validation runs therefore use kappa * T <= 2.
"""

import logging
import math

import numpy as np

from ..data.models import BlockKernel, ChannelSpec, ChannelState, OnOffChain
from ..exceptions import InvalidParameterError

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


def outage_threshold(gamma: float, rate: float) -> float:
    """Return psi = (2^R - 1) / gamma, evaluated without cancellation at small R."""
    try:
        return math.expm1(rate * LN2) / gamma
    except OverflowError:
        return math.inf


def derive_chain(spec: ChannelSpec) -> OnOffChain:
    """Map a channel specification to its ON/OFF service chain.

    Args:
        spec: Channel SNR, fixed rate and memory decay rate.

    Returns:
        The chain with nu = kappa e^-psi, mu = kappa (1 - e^-psi) and
        p_on = e^-psi.
    """
    psi = outage_threshold(spec.gamma, spec.rate)
    p_on = math.exp(-psi)
    nu = spec.kappa * p_on
    mu = -spec.kappa * math.expm1(-psi)
    return OnOffChain(nu=nu, mu=mu, p_on=p_on, psi=psi)


def instantaneous_capacity(gamma: float, z: float) -> float:
    """Return the Shannon capacity log2(1 + gamma z) of one block in bits."""
    if gamma <= 0:
        raise InvalidParameterError("must be positive", "gamma", gamma)
    if z < 0:
        raise InvalidParameterError("cannot be negative", "z", z)
    return math.log2(1.0 + gamma * z)


def is_on(gamma: float, z: float, rate: float) -> bool:
    """Check whether a block with gain z carries rate R without outage."""
    return instantaneous_capacity(gamma, z) > rate


def discretize(chain: OnOffChain, block_duration: float) -> BlockKernel:
    """Sample the continuous-time chain once per block.

    The kernel is the exact matrix exponential of the 2-state generator:
    p(ON->ON) = p_on + (1 - p_on) e^{-kappa T} and
    p(OFF->ON) = p_on (1 - e^{-kappa T}).

    Args:
        chain: Continuous-time ON/OFF chain.
        block_duration: Block length T (in blocks of the rate unit).

    Returns:
        Row-stochastic kernel indexed by ChannelState.
    """
    if not block_duration > 0:
        raise InvalidParameterError("must be positive", "block_duration", block_duration)

    mixing = -math.expm1(-chain.kappa * block_duration)
    p_off_on = chain.p_on * mixing
    p_on_off = (1.0 - chain.p_on) * mixing

    transitions = (
        (1.0 - p_off_on, p_off_on),
        (p_on_off, 1.0 - p_on_off),
    )
    logger.debug(
        f"Discretized chain kappa={chain.kappa:.6g} at T={block_duration:.6g}: "
        f"p(ON->ON)={transitions[ChannelState.ON][ChannelState.ON]:.12g}"
    )
    return BlockKernel(transitions=transitions, block_duration=block_duration)


def generator_matrix(chain: OnOffChain) -> np.ndarray:
    """Return the generator Q of the chain with OFF in row 0 and ON in row 1."""
    return np.array([[-chain.nu, chain.nu], [chain.mu, -chain.mu]])


def kernel_array(kernel: BlockKernel) -> np.ndarray:
    """Return the kernel as a 2x2 numpy array."""
    return np.array(kernel.transitions, dtype=float)


def db_to_linear(gamma_db: float) -> float:
    """Convert an SNR in dB to linear scale."""
    return float(10.0 ** (gamma_db / 10.0))


def linear_to_db(gamma: float) -> float:
    """Convert a linear SNR to dB."""
    if gamma <= 0:
        raise InvalidParameterError("must be positive", "gamma", gamma)
    return 10.0 * math.log10(gamma)
