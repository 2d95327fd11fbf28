#!/usr/bin/env python3
"""Slotted-time Monte Carlo queue simulator and tilted-mean estimators.

Per block k the channel follows its continuous-time ON/OFF chain and serves
S_k = R times the ON time inside the block, arrivals A_k follow the source
family, and the backlog follows Q_k = max(0, Q_{k-1} + A_k - S_k).

The estimators of effective capacity and effective bandwidth sample the
chains under an exponential twist and average the tilted exponentials with
their likelihood ratios in the log domain.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..channel.markov_channel import derive_chain
from ..config import SimulationDefaults
from ..data.models import (
    ChannelSpec,
    MonteCarloEstimate,
    OnOffChain,
    SimConfig,
    SimReport,
    SourceModel,
    ThetaLike,
    theta_value,
)
from ..exceptions import InvalidParameterError
from ..sources.base import BaseArrivalModel
from ..sources.markov_sources import arrival_model, mean_rate
from ..utils.markov_paths import sample_block_on_times, sample_occupation
from ..utils.numerics import log_mean_exp
from ..utils.tilting import twist_generator
from .tail_fit import empirical_tail, fit_tail_decay, trim_tail

logger = logging.getLogger(__name__)

CHUNK_BLOCKS = 1 << 16
ZERO_TOLERANCE = 1e-6


@dataclass
class _ReplicaStats:
    """Per-replica statistics before aggregation."""

    mean_arrival: float
    mean_service: float
    zeta: float
    channel_on: float
    source_on: float
    queue_tail: np.ndarray
    queue_counts: np.ndarray
    delay_tail: np.ndarray
    delay_counts: np.ndarray
    fitted_decay: float


def lindley(arrivals: np.ndarray, service: np.ndarray, initial: float = 0.0) -> np.ndarray:
    """Return the end-of-block backlog of a FIFO queue.

    The recursion is evaluated as a reflected random walk, chunk by chunk so
    that the partial sums stay small.
    """
    queue = np.empty(arrivals.size)
    backlog = initial
    for start in range(0, arrivals.size, CHUNK_BLOCKS):
        stop = min(start + CHUNK_BLOCKS, arrivals.size)
        drift = np.cumsum(arrivals[start:stop] - service[start:stop])
        floor = np.minimum(np.minimum.accumulate(backlog + drift), 0.0)
        chunk = np.maximum(backlog + drift - floor, 0.0)
        queue[start:stop] = chunk
        backlog = float(chunk[-1])
    return queue


def virtual_delays(service: np.ndarray, queue: np.ndarray, tolerance: float) -> np.ndarray:
    """Return the FIFO waiting time in whole blocks of the bits arriving in each block.

    Bits arriving in block k find the backlog Q_{k-1} left by earlier blocks
    and wait until the service from block k on has cleared it. The delay is
    the number of blocks after k this takes, so bits that find an empty
    buffer have delay 0. Blocks whose backlog is still queued at the horizon
    get the censored value blocks - k.
    """
    served = np.cumsum(service)
    served_before = np.concatenate(([0.0], served[:-1]))
    backlog_before = np.concatenate(([0.0], queue[:-1]))
    target = served_before + backlog_before - tolerance
    departure = np.searchsorted(served, target, side="left")
    return np.maximum(departure - np.arange(service.size), 0)


def _simulate_replica(
    config: SimConfig,
    model: BaseArrivalModel,
    chain: OnOffChain,
    seed: np.random.SeedSequence,
    max_queue: int,
    max_delay: int,
    estimate_tails: bool,
) -> _ReplicaStats:
    rng = np.random.default_rng(seed)
    duration = config.block_duration
    quantum = config.channel.rate * duration

    channel_on = sample_block_on_times(chain.nu, chain.mu, config.blocks, duration, rng)
    service = config.channel.rate * channel_on
    arrivals, source_on = model.sample_block_arrivals(config.blocks, rng, duration)

    window = slice(config.warmup, None)
    mean_arrival = float(arrivals[window].mean()) / duration
    mean_service = float(service[window].mean()) / duration
    channel_fraction = float(channel_on[window].mean()) / duration
    source_fraction = float(source_on[window].mean())

    if not estimate_tails:
        empty = np.zeros(0)
        return _ReplicaStats(
            mean_arrival, mean_service, math.nan, channel_fraction, source_fraction,
            empty, empty, empty, empty, math.nan,
        )

    unit = quantum if quantum > 0 else max(model.peak_rate() * duration, 1.0)
    tolerance = ZERO_TOLERANCE * unit
    queue = lindley(arrivals, service)
    observed = queue[window]

    # buffer content at the start of each block, after that block's arrivals
    backlog_before = np.concatenate(([0.0], queue[:-1]))
    zeta = float(np.mean((backlog_before + arrivals)[window] > tolerance))

    levels = np.ceil(observed / unit - ZERO_TOLERANCE).astype(np.int64)
    level_tail, level_counts = empirical_tail(np.maximum(levels, 0), None, max_queue + 1)
    queue_tail, queue_counts = level_tail[1:], level_counts[1:]

    delays = virtual_delays(service, queue, tolerance)
    stop = config.blocks - (max_delay + 1)
    span = slice(config.warmup, max(stop, config.warmup))
    mask = arrivals[span] > 0
    delay_tail, delay_counts = empirical_tail(
        delays[span][mask], arrivals[span][mask], max_delay
    )

    return _ReplicaStats(
        mean_arrival=mean_arrival,
        mean_service=mean_service,
        zeta=zeta,
        channel_on=channel_fraction,
        source_on=source_fraction,
        queue_tail=queue_tail,
        queue_counts=queue_counts,
        delay_tail=delay_tail,
        delay_counts=delay_counts,
        fitted_decay=fit_tail_decay(delay_tail, delay_counts),
    )


def _is_stable(config: SimConfig) -> bool:
    arrival = mean_rate(config.source)
    if arrival == 0.0:
        return True
    service = config.channel.rate * derive_chain(config.channel).p_on
    return arrival < service


def simulate(config: SimConfig, workers: int = 1) -> SimReport:
    """Simulate the queue and estimate its backlog and delay tails.

    Replicas use independent children of ``SeedSequence(config.seed)``, so a
    given configuration always yields the same report, whatever ``workers``.

    Args:
        config: Channel, source, horizon and seeding.
        workers: Number of threads running replicas.

    Returns:
        SimReport averaged over replicas. An unstable queue has empty tails
        and NaN in place of every tail statistic.
    """
    model = arrival_model(config.source)
    chain = derive_chain(config.channel)
    seeds = np.random.SeedSequence(config.seed).spawn(config.replicas)

    stable = _is_stable(config)
    if not stable:
        logger.warning(
            f"Unstable queue: mean arrival rate {mean_rate(config.source):.6g} is not below "
            f"the mean service rate; tails are not estimable"
        )

    observed_blocks = config.blocks - config.warmup
    max_delay = min(SimulationDefaults.MAX_TAIL_LEVELS, max(1, observed_blocks // 2))
    max_queue = SimulationDefaults.MAX_TAIL_LEVELS

    def run(seed: np.random.SeedSequence) -> _ReplicaStats:
        return _simulate_replica(config, model, chain, seed, max_queue, max_delay, stable)

    logger.info(
        f"Simulating {config.replicas} replicas of {config.blocks} blocks "
        f"({config.source.family.value} source, workers={workers})"
    )
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            replicas = list(executor.map(run, seeds))
    else:
        replicas = [run(seed) for seed in seeds]

    mean_arrival = float(np.mean([r.mean_arrival for r in replicas]))
    mean_service = float(np.mean([r.mean_service for r in replicas]))
    channel_on = float(np.mean([r.channel_on for r in replicas]))
    source_on = float(np.mean([r.source_on for r in replicas]))

    if not stable:
        return SimReport(
            mean_arrival=mean_arrival,
            mean_service=mean_service,
            queue_tail=[],
            delay_tail=[],
            fitted_decay=math.nan,
            zeta_hat=math.nan,
            ci_halfwidth=math.nan,
            stable=False,
            channel_on_fraction=channel_on,
            source_on_fraction=source_on,
            blocks=config.blocks,
            replicas=config.replicas,
        )

    queue_tail = np.mean([r.queue_tail for r in replicas], axis=0)
    delay_matrix = np.array([r.delay_tail for r in replicas])
    delay_tail = delay_matrix.mean(axis=0)
    delay_counts = np.sum([r.delay_counts for r in replicas], axis=0)
    if config.replicas > 1:
        delay_se = delay_matrix.std(axis=0, ddof=1) / math.sqrt(config.replicas)
    else:
        delay_se = np.zeros_like(delay_tail)

    fits = np.array([r.fitted_decay for r in replicas])
    fits = fits[np.isfinite(fits)]
    ci_halfwidth = (
        SimulationDefaults.CONFIDENCE_Z * float(fits.std(ddof=1)) / math.sqrt(fits.size)
        if fits.size > 1
        else math.nan
    )

    unit = config.channel.rate * config.block_duration
    if unit <= 0:
        unit = max(model.peak_rate() * config.block_duration, 1.0)
    keep_queue = trim_tail(queue_tail)
    keep_delay = trim_tail(delay_tail) if delay_tail.any() else 1

    return SimReport(
        mean_arrival=mean_arrival,
        mean_service=mean_service,
        queue_tail=[(j * unit, float(p)) for j, p in enumerate(queue_tail[:keep_queue])],
        delay_tail=[(float(d), float(p)) for d, p in enumerate(delay_tail[:keep_delay])],
        fitted_decay=fit_tail_decay(delay_tail, delay_counts),
        zeta_hat=float(np.mean([r.zeta for r in replicas])),
        ci_halfwidth=ci_halfwidth,
        stable=True,
        channel_on_fraction=channel_on,
        source_on_fraction=source_on,
        delay_tail_se=[float(x) for x in delay_se[:keep_delay]],
        blocks=config.blocks,
        replicas=config.replicas,
    )


def estimator_horizons(blocks: int) -> tuple[int, int]:
    """Return the two horizons (t // 2, t) whose log-moment growth is estimated."""
    if blocks < 1:
        raise InvalidParameterError("must be at least 1", "blocks", blocks)
    return blocks // 2, blocks


def _warn_if_degenerate(log_weights: np.ndarray) -> None:
    weights = np.exp(log_weights - log_weights.max())
    share = float(weights.sum() ** 2 / np.sum(weights * weights)) / weights.size
    if share < SimulationDefaults.MIN_EFFECTIVE_SAMPLE_FRACTION:
        logger.warning(
            f"Variance blow-up: effective sample share {share:.3g} of the tilted weights is below "
            f"{SimulationDefaults.MIN_EFFECTIVE_SAMPLE_FRACTION:g}; the estimate is dominated by rare paths"
        )


def _growth_estimate(
    log_weights: np.ndarray, theta: float, horizons: tuple[int, int], sign: float
) -> MonteCarloEstimate:
    """Turn log-weights at two horizons into a growth rate with a batch-means error.

    The rate is sign * [log E(t) - log E(t/2)] / (theta t/2). Taking the
    difference removes the boundary term of the stationary start, which
    otherwise biases a single-horizon estimate by O(1/t).
    """
    early, late = horizons
    scale = theta * (late - early)

    def rate(weights: np.ndarray) -> float:
        return sign * (log_mean_exp(weights[1]) - log_mean_exp(weights[0])) / scale

    replicas = log_weights.shape[1]
    _warn_if_degenerate(log_weights[1])
    batches = min(SimulationDefaults.ESTIMATOR_BATCHES, replicas)
    if batches > 1:
        rates = [rate(part) for part in np.array_split(log_weights, batches, axis=1)]
        stderr = float(np.std(rates, ddof=1)) / math.sqrt(batches)
    else:
        stderr = math.nan

    return MonteCarloEstimate(
        value=rate(log_weights),
        stderr=stderr,
        replicas=replicas,
        horizon=float(late),
        z=SimulationDefaults.CONFIDENCE_Z,
    )


def estimate_effective_capacity(
    channel: ChannelSpec,
    theta: ThetaLike,
    blocks: int = SimulationDefaults.ESTIMATOR_HORIZON,
    replicas: int = SimulationDefaults.ESTIMATOR_REPLICAS,
    seed: int = SimulationDefaults.SEED,
) -> MonteCarloEstimate:
    """Estimate -(1/theta t) log E[exp(-theta S(t))] by importance sampling.

    Service paths are drawn from the channel chain twisted by the Perron
    vector of Q - diag(0, theta R) and weighted by their likelihood ratios.

    Args:
        channel: Channel specification.
        theta: QoS exponent.
        blocks: Horizon t in blocks.
        replicas: Number of independent service paths.
        seed: Seed of the random stream.

    Returns:
        Point estimate with its batch-means standard error.
    """
    theta = theta_value(theta)
    horizons = estimator_horizons(blocks)
    chain = derive_chain(channel)
    if channel.rate == 0.0 or chain.p_on == 0.0:
        return MonteCarloEstimate(0.0, 0.0, replicas, float(blocks))

    tilt = -theta * channel.rate
    twist = twist_generator(chain.nu, chain.mu, tilt)
    rng = np.random.default_rng(seed)
    sample = sample_occupation(
        twist.twisted_off_on, twist.twisted_on_off, horizons, replicas, rng, p_on=chain.p_on
    )
    log_weights = tilt * sample.on_time + twist.log_likelihood(sample, horizons)
    return _growth_estimate(log_weights, theta, horizons, -1.0)


def estimate_effective_bandwidth(
    source: SourceModel,
    theta: ThetaLike,
    blocks: int = SimulationDefaults.ESTIMATOR_HORIZON,
    replicas: int = SimulationDefaults.ESTIMATOR_REPLICAS,
    seed: int = SimulationDefaults.SEED,
) -> MonteCarloEstimate:
    """Estimate (1/theta t) log E[exp(theta A(t))] by importance sampling.

    Args:
        source: Arrival source.
        theta: QoS exponent.
        blocks: Horizon t in blocks.
        replicas: Number of independent arrival paths.
        seed: Seed of the random stream.

    Returns:
        Point estimate with its batch-means standard error.
    """
    theta = theta_value(theta)
    horizons = estimator_horizons(blocks)
    model = arrival_model(source)
    if source.lambda_on == 0.0 or model.steady_state_on() == 0.0:
        return MonteCarloEstimate(0.0, 0.0, replicas, float(blocks))

    rng = np.random.default_rng(seed)
    log_weights = model.sample_tilted_log_moments(theta, horizons, replicas, rng)
    return _growth_estimate(log_weights, theta, horizons, 1.0)
