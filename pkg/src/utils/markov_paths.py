"""Vectorised sample-path generators for two-state Markov chains.

All samplers take an explicit numpy Generator so that replicas drawn from
disjoint SeedSequence children never share a random stream.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidParameterError


def _leave_lengths(leave: float, size: int, cap: int, rng: np.random.Generator) -> np.ndarray:
    if leave <= 0.0:
        return np.full(size, cap, dtype=np.int64)
    return rng.geometric(min(leave, 1.0), size=size).astype(np.int64)


def sample_discrete_path(
    stay_off: float,
    stay_on: float,
    blocks: int,
    rng: np.random.Generator,
    start_on: bool | None = None,
) -> np.ndarray:
    """Sample the ON indicator of a discrete-time two-state chain.

    The path is assembled from alternating geometric run lengths, which is
    exact for a Markov chain and avoids a Python loop over blocks.

    Args:
        stay_off: Probability of remaining OFF for one more step.
        stay_on: Probability of remaining ON for one more step.
        blocks: Path length.
        rng: Random generator.
        start_on: Initial state; drawn from the stationary law when None.

    Returns:
        Boolean array of length ``blocks``; True marks an ON step.
    """
    if blocks < 1:
        raise InvalidParameterError("must be at least 1", "blocks", blocks)

    leave_off = 1.0 - stay_off
    leave_on = 1.0 - stay_on
    if start_on is None:
        total = leave_off + leave_on
        p_on = 0.5 if total == 0 else leave_off / total
        start_on = bool(rng.random() < p_on)

    mean_cycle = sum(1.0 / x if x > 0 else float(blocks) for x in (leave_off, leave_on))
    chunk = min(blocks, math.ceil(1.2 * blocks / mean_cycle) + 64)

    first_leave, second_leave = (leave_on, leave_off) if start_on else (leave_off, leave_on)
    lengths: list[np.ndarray] = []
    covered = 0
    while covered < blocks:
        first = _leave_lengths(first_leave, chunk, blocks, rng)
        second = _leave_lengths(second_leave, chunk, blocks, rng)
        pair = np.empty(2 * chunk, dtype=np.int64)
        pair[0::2] = first
        pair[1::2] = second
        lengths.append(pair)
        covered += int(pair.sum())

    runs = np.concatenate(lengths)
    states = np.zeros(runs.size, dtype=bool)
    states[0::2] = start_on
    states[1::2] = not start_on
    return np.repeat(states, runs)[:blocks]



def _sojourns(rate: float, size: int, cap: float, rng: np.random.Generator) -> np.ndarray:
    if rate <= 0.0:
        return np.full(size, cap)
    return rng.exponential(1.0 / rate, size=size)


def sample_block_on_times(
    rate_off_on: float,
    rate_on_off: float,
    blocks: int,
    block_duration: float,
    rng: np.random.Generator,
    start_on: bool | None = None,
) -> np.ndarray:
    """Sample the ON time inside each block of a continuous-time two-state chain.

    One exact path is drawn from alternating exponential sojourns and its
    occupation time is read off at the block edges.

    Args:
        rate_off_on: Transition rate OFF -> ON.
        rate_on_off: Transition rate ON -> OFF.
        blocks: Number of blocks.
        block_duration: Block length T.
        rng: Random generator.
        start_on: Initial state; drawn from the stationary law when None.

    Returns:
        Array of length ``blocks`` with values in [0, T].
    """
    if blocks < 1:
        raise InvalidParameterError("must be at least 1", "blocks", blocks)
    total = rate_off_on + rate_on_off
    if total <= 0:
        raise InvalidParameterError("chain must have a positive decay rate", "rates", (rate_off_on, rate_on_off))

    horizon = blocks * block_duration
    if start_on is None:
        start_on = bool(rng.random() < rate_off_on / total)

    first, second = (rate_on_off, rate_off_on) if start_on else (rate_off_on, rate_on_off)
    mean_cycle = sum(1.0 / x if x > 0 else horizon for x in (first, second))
    chunk = math.ceil(1.2 * horizon / mean_cycle) + 64

    pieces: list[np.ndarray] = []
    covered = 0.0
    while covered < horizon:
        pair = np.empty(2 * chunk)
        pair[0::2] = _sojourns(first, chunk, horizon, rng)
        pair[1::2] = _sojourns(second, chunk, horizon, rng)
        pieces.append(pair)
        covered += float(pair.sum())

    lengths = np.concatenate(pieces)
    ends = np.cumsum(lengths)
    starts = ends - lengths
    on = np.zeros(lengths.size, dtype=bool)
    on[0::2] = start_on
    on[1::2] = not start_on
    on_before = np.concatenate(([0.0], np.cumsum(np.where(on, lengths, 0.0))[:-1]))

    edges = np.arange(blocks + 1) * block_duration
    segment = np.minimum(np.searchsorted(ends, edges, side="right"), lengths.size - 1)
    occupied = on_before[segment] + np.where(on[segment], edges - starts[segment], 0.0)
    return np.clip(np.diff(occupied), 0.0, block_duration)


@dataclass(frozen=True)
class OccupationSample:
    """ON time and jump counts of continuous-time paths, one row per horizon."""

    on_time: np.ndarray
    jumps_on: np.ndarray
    jumps_off: np.ndarray


def sample_occupation(
    rate_off_on: float,
    rate_on_off: float,
    horizons: Sequence[float],
    replicas: int,
    rng: np.random.Generator,
    p_on: float | None = None,
) -> OccupationSample:
    """Sample ON times and OFF->ON / ON->OFF jump counts up to each horizon.

    All replicas advance in lockstep, one sojourn per iteration, so the cost
    scales with the number of jumps rather than with time.

    Args:
        rate_off_on: Transition rate OFF -> ON.
        rate_on_off: Transition rate ON -> OFF.
        horizons: Nondecreasing observation times.
        replicas: Number of independent paths.
        rng: Random generator.
        p_on: Probability of starting ON; the stationary law of the
            sampled chain when None.

    Returns:
        OccupationSample whose arrays have shape (len(horizons), replicas).
    """
    total = rate_off_on + rate_on_off
    if total <= 0:
        raise InvalidParameterError("chain must have a positive decay rate", "rates", (rate_off_on, rate_on_off))
    times = np.asarray(horizons, dtype=float)
    if times.ndim != 1 or times.size == 0 or np.any(np.diff(times) < 0) or times[0] < 0:
        raise InvalidParameterError("must be a nondecreasing list of non-negative times", "horizons", horizons)
    if p_on is None:
        p_on = rate_off_on / total

    on = rng.random(replicas) < p_on
    clock = np.zeros(replicas)
    on_time = np.zeros((times.size, replicas))
    jumps_on = np.zeros((times.size, replicas), dtype=np.int64)
    jumps_off = np.zeros((times.size, replicas), dtype=np.int64)
    active = np.arange(replicas)
    last = times[-1]

    while active.size:
        state = on[active]
        rates = np.where(state, rate_on_off, rate_off_on)
        with np.errstate(divide="ignore"):
            sojourn = rng.standard_exponential(active.size) / rates
        start = clock[active]
        end = start + sojourn
        for i, horizon in enumerate(times):
            on_time[i, active] += np.where(state, np.clip(np.minimum(end, horizon) - start, 0.0, None), 0.0)
            jumped = end < horizon
            jumps_off[i, active] += jumped & state
            jumps_on[i, active] += jumped & ~state
        clock[active] = end
        on[active] = ~state
        active = active[end < last]

    return OccupationSample(on_time=on_time, jumps_on=jumps_on, jumps_off=jumps_off)


@dataclass(frozen=True)
class TransitionSample:
    """ON-step and transition counts of discrete-time paths, one row per horizon.

    ``transitions[h, i, j]`` counts the i -> j moves among the first
    ``horizons[h]`` steps, with 0 = OFF and 1 = ON.
    """

    on_steps: np.ndarray
    transitions: np.ndarray


def sample_transitions(
    stay_off: float,
    stay_on: float,
    horizons: Sequence[int],
    replicas: int,
    rng: np.random.Generator,
    p_on: float | None = None,
) -> TransitionSample:
    """Count ON steps and transitions up to each horizon for many replicas.

    Args:
        stay_off: Probability of remaining OFF for one more step.
        stay_on: Probability of remaining ON for one more step.
        horizons: Nondecreasing step counts.
        replicas: Number of independent paths.
        rng: Random generator.
        p_on: Probability that the first step is ON; the stationary law of
            the sampled chain when None.

    Returns:
        TransitionSample with ``on_steps`` of shape (len(horizons), replicas)
        and ``transitions`` of shape (len(horizons), 2, 2, replicas).
    """
    steps = np.asarray(horizons, dtype=np.int64)
    if steps.ndim != 1 or steps.size == 0 or np.any(np.diff(steps) < 0) or steps[0] < 0:
        raise InvalidParameterError("must be a nondecreasing list of non-negative step counts", "horizons", horizons)
    if p_on is None:
        leave_off, leave_on = 1.0 - stay_off, 1.0 - stay_on
        total = leave_off + leave_on
        p_on = 0.5 if total == 0 else leave_off / total

    on_steps = np.zeros((steps.size, replicas), dtype=np.int64)
    transitions = np.zeros((steps.size, 2, 2, replicas), dtype=np.int64)
    running_on = np.zeros(replicas, dtype=np.int64)
    running = np.zeros((2, 2, replicas), dtype=np.int64)
    index = np.arange(replicas)
    on = np.zeros(replicas, dtype=bool)

    for step in range(1, int(steps[-1]) + 1):
        if step == 1:
            on = rng.random(replicas) < p_on
        else:
            draw = rng.random(replicas)
            following = np.where(on, draw < stay_on, draw >= stay_off)
            running[on.astype(np.intp), following.astype(np.intp), index] += 1
            on = following
        running_on += on
        for h in np.flatnonzero(steps == step):
            on_steps[h] = running_on
            transitions[h] = running

    return TransitionSample(on_steps=on_steps, transitions=transitions)
