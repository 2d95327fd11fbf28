"""Data models for the QoS provisioning toolkit.

This module defines the immutable value types passed between the channel,
source, analysis and simulation layers. Every model validates itself on
construction so that downstream numerics can rely on its invariants.
"""

import math
import numbers
from dataclasses import asdict, dataclass, field, replace
from enum import Enum, IntEnum
from typing import Any

from ..exceptions import DegenerateChainError, InvalidParameterError


class SourceFamily(Enum):
    """Enumeration of the supported Markov arrival families."""

    DTMS = "dtms"
    MFS = "mfs"
    MMPS = "mmps"


class MatchMethod(Enum):
    """How a maximum arrival rate was obtained."""

    CLOSED_FORM = "closed_form"
    BISECTION = "bisection"


class ChannelState(IntEnum):
    """Index of the two chain states in every 2x2 matrix."""

    OFF = 0
    ON = 1


def _finite(name: str, value: float) -> float:
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise InvalidParameterError("must be a real number", name, value)
    if not math.isfinite(value):
        raise InvalidParameterError("must be finite", name, value)
    return float(value)


def _positive(name: str, value: float) -> float:
    value = _finite(name, value)
    if value <= 0:
        raise InvalidParameterError("must be positive", name, value)
    return value


def _non_negative(name: str, value: float) -> float:
    value = _finite(name, value)
    if value < 0:
        raise InvalidParameterError("cannot be negative", name, value)
    return value


def _probability(name: str, value: float) -> float:
    value = _finite(name, value)
    if not 0.0 <= value <= 1.0:
        raise InvalidParameterError("must lie in [0, 1]", name, value)
    return value


@dataclass(frozen=True)
class ChannelSpec:
    """Fixed-rate link over a Rayleigh block-fading channel.

    The triple (gamma, rate, kappa) fully determines the ON/OFF service chain.
    """

    gamma: float
    rate: float
    kappa: float

    def __post_init__(self) -> None:
        """Validate channel parameters."""
        _positive("gamma", self.gamma)
        _non_negative("rate", self.rate)
        _positive("kappa", self.kappa)

    def with_rate(self, rate: float) -> "ChannelSpec":
        """Return a copy of this channel transmitting at another fixed rate."""
        return replace(self, rate=rate)

    def to_dict(self) -> dict[str, float]:
        """Convert the channel to a plain dictionary."""
        return asdict(self)


@dataclass(frozen=True)
class OnOffChain:
    """Two-state continuous-time Markov service chain of a fixed-rate link."""

    nu: float
    mu: float
    p_on: float
    psi: float

    def __post_init__(self) -> None:
        """Validate chain rates and the stationary probability."""
        _non_negative("nu", self.nu)
        _non_negative("mu", self.mu)
        _probability("p_on", self.p_on)
        _non_negative("psi", self.psi)
        if self.nu + self.mu <= 0:
            raise InvalidParameterError("chain must have a positive decay rate", "nu+mu", self.nu + self.mu)

    @property
    def kappa(self) -> float:
        """Channel memory decay rate nu + mu."""
        return self.nu + self.mu

    @property
    def p_off(self) -> float:
        """Outage probability of a block."""
        return self.mu / self.kappa

    def to_dict(self) -> dict[str, float]:
        """Convert the chain to a plain dictionary."""
        return {**asdict(self), "kappa": self.kappa, "p_off": self.p_off}


@dataclass(frozen=True)
class BlockKernel:
    """Per-block transition probabilities between OFF (row 0) and ON (row 1)."""

    transitions: tuple[tuple[float, float], tuple[float, float]]
    block_duration: float

    def __post_init__(self) -> None:
        """Validate that the kernel is row-stochastic."""
        _positive("block_duration", self.block_duration)
        for row in self.transitions:
            for entry in row:
                if not 0.0 <= entry <= 1.0:
                    raise InvalidParameterError("kernel entries must lie in [0, 1]", "transitions", self.transitions)
            if abs(sum(row) - 1.0) > 1e-12:
                raise InvalidParameterError("kernel rows must sum to 1", "transitions", self.transitions)

    @property
    def p_off_on(self) -> float:
        """Probability of moving from OFF to ON within one block."""
        return self.transitions[ChannelState.OFF][ChannelState.ON]

    @property
    def p_on_on(self) -> float:
        """Probability of staying ON for one block."""
        return self.transitions[ChannelState.ON][ChannelState.ON]

    @property
    def p_on_off(self) -> float:
        """Probability of moving from ON to OFF within one block."""
        return self.transitions[ChannelState.ON][ChannelState.OFF]

    @property
    def p_off_off(self) -> float:
        """Probability of staying OFF for one block."""
        return self.transitions[ChannelState.OFF][ChannelState.OFF]

    def stationary(self) -> tuple[float, float]:
        """Return the stationary vector (P_OFF, P_ON) of the kernel."""
        leave = self.p_off_on + self.p_on_off
        if leave == 0:
            return (math.nan, math.nan)
        p_on = self.p_off_on / leave
        return (self.p_on_off / leave, p_on)


@dataclass(frozen=True)
class QosExponent:
    """Decay rate of the buffer and delay tail (1/bits)."""

    theta: float

    def __post_init__(self) -> None:
        """Reject zero and negative exponents; limits have dedicated operations."""
        _positive("theta", self.theta)


ThetaLike = QosExponent | float


def theta_value(theta: ThetaLike) -> float:
    """Return the validated float value of a QoS exponent."""
    if isinstance(theta, QosExponent):
        return theta.theta
    return QosExponent(theta).theta


@dataclass(frozen=True)
class EffectiveCapacityResult:
    """Closed-form effective capacity of the fixed-rate ON/OFF service."""

    value: float
    xi: float
    upper_bound: float
    theta: float

    def __post_init__(self) -> None:
        """Validate 0 <= C_E <= R exp(-psi)."""
        _non_negative("value", self.value)
        _non_negative("upper_bound", self.upper_bound)
        if self.value > self.upper_bound * (1.0 + 1e-12) + 1e-300:
            raise InvalidParameterError("effective capacity exceeds its upper bound", "value", self.value)

    def to_dict(self) -> dict[str, float]:
        """Convert the result to a plain dictionary."""
        return asdict(self)


@dataclass(frozen=True)
class DTMSSource:
    """Discrete-time Markov ON/OFF source (lambda_on bits per ON block)."""

    p11: float
    p22: float
    lambda_on: float = 1.0

    family = SourceFamily.DTMS

    def __post_init__(self) -> None:
        """Validate transition probabilities and reject absorbing chains."""
        _probability("p11", self.p11)
        _probability("p22", self.p22)
        _non_negative("lambda_on", self.lambda_on)
        if self.p11 == 1.0 and self.p22 == 1.0:
            raise DegenerateChainError("chain is reducible (both states absorbing)", "p11,p22", (self.p11, self.p22))

    @classmethod
    def from_burstiness(cls, s: float, lambda_on: float = 1.0) -> "DTMSSource":
        """Build the single-parameter source with p11 = 1 - s and p22 = s."""
        return BurstinessParam(s).to_source(lambda_on)

    def with_lambda(self, lambda_on: float) -> "DTMSSource":
        """Return the same chain with another ON-state rate."""
        return replace(self, lambda_on=lambda_on)

    def to_dict(self) -> dict[str, Any]:
        """Convert the source to a plain dictionary."""
        return {"family": self.family.value, **asdict(self)}


@dataclass(frozen=True)
class _ModulatedSource:
    """Continuous-time ON/OFF modulation shared by the fluid and Poisson sources."""

    alpha: float
    beta: float
    lambda_on: float = 1.0

    family = SourceFamily.MFS

    def __post_init__(self) -> None:
        """Validate the modulating rates."""
        _positive("alpha", self.alpha)
        _non_negative("beta", self.beta)
        _non_negative("lambda_on", self.lambda_on)

    @classmethod
    def from_p_on(cls, p_on: float, lambda_on: float = 1.0, total_rate: float = 10.0) -> Any:
        """Build a source with the given P_ON and alpha + beta = total_rate."""
        p_on = _probability("p_on", p_on)
        total_rate = _positive("total_rate", total_rate)
        return cls(alpha=total_rate * p_on, beta=total_rate * (1.0 - p_on), lambda_on=lambda_on)

    def with_lambda(self, lambda_on: float) -> Any:
        """Return the same modulation with another ON-state rate."""
        return replace(self, lambda_on=lambda_on)

    def to_dict(self) -> dict[str, Any]:
        """Convert the source to a plain dictionary."""
        return {"family": self.family.value, **asdict(self)}


@dataclass(frozen=True)
class MFSSource(_ModulatedSource):
    """Markov fluid source emitting lambda_on bits per block while ON."""

    family = SourceFamily.MFS


@dataclass(frozen=True)
class MMPSSource(_ModulatedSource):
    """Markov-modulated Poisson source with intensity lambda_on while ON."""

    family = SourceFamily.MMPS


SourceModel = DTMSSource | MFSSource | MMPSSource


@dataclass(frozen=True)
class BurstinessParam:
    """Single burstiness parameter s of the simplified DTMS (p11 = 1 - s, p22 = s)."""

    s: float

    def __post_init__(self) -> None:
        """Validate 0 < s <= 1."""
        value = _finite("s", self.s)
        if not 0.0 < value <= 1.0:
            raise InvalidParameterError("must lie in (0, 1]", "s", self.s)

    def to_source(self, lambda_on: float = 1.0) -> DTMSSource:
        """Return the equivalent general DTMS source."""
        return DTMSSource(p11=1.0 - self.s, p22=self.s, lambda_on=lambda_on)


@dataclass(frozen=True)
class MatchResult:
    """Maximum supportable arrival rates from the matching condition a(theta) = C_E."""

    lambda_on_star: float
    lambda_avg_star: float
    residual: float
    method: MatchMethod
    family: SourceFamily
    c_e: float
    theta: float
    p_on: float
    alternate_lambda_avg: float | None = None
    alternate_residual: float | None = None

    def __post_init__(self) -> None:
        """Validate lambda_avg* = lambda* P_ON."""
        _non_negative("lambda_on_star", self.lambda_on_star)
        _non_negative("lambda_avg_star", self.lambda_avg_star)
        expected = self.lambda_on_star * self.p_on
        if abs(self.lambda_avg_star - expected) > 1e-12 * max(1.0, abs(expected)):
            raise InvalidParameterError("average rate must equal lambda* P_ON", "lambda_avg_star", self.lambda_avg_star)

    def to_dict(self) -> dict[str, Any]:
        """Convert the result to a dictionary for export."""
        data = asdict(self)
        data["method"] = self.method.value
        data["family"] = self.family.value
        return data


@dataclass(frozen=True)
class OptimumRate:
    """Throughput-optimal fixed rate and its certificates."""

    r_star: float
    c_e_star: float
    foc_residual: float
    bracket: tuple[float, float]
    method: str = "golden_section"
    unimodal: bool = True
    iterations: int = 0
    trace: tuple[tuple[float, float], ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        """Validate the optimum lies in its bracket."""
        _non_negative("r_star", self.r_star)
        _non_negative("c_e_star", self.c_e_star)
        lower, upper = self.bracket
        if not lower <= self.r_star <= upper:
            raise InvalidParameterError("optimum outside its bracket", "r_star", self.r_star)

    def to_dict(self) -> dict[str, Any]:
        """Convert the optimum to a dictionary, omitting the search trace."""
        return {
            "r_star": self.r_star,
            "c_e_star": self.c_e_star,
            "foc_residual": self.foc_residual,
            "bracket": list(self.bracket),
            "method": self.method,
            "unimodal": self.unimodal,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class DelayModel:
    """Parameters of the exponential delay-violation approximation."""

    theta: float
    bandwidth: float
    zeta: float = 1.0

    def __post_init__(self) -> None:
        """Validate the delay model parameters."""
        _positive("theta", self.theta)
        _non_negative("bandwidth", self.bandwidth)
        _probability("zeta", self.zeta)


@dataclass(frozen=True)
class SimConfig:
    """Configuration of a slotted-time queue simulation."""

    channel: ChannelSpec
    source: SourceModel
    blocks: int
    warmup: int = 0
    replicas: int = 1
    seed: int = 0
    block_duration: float = 1.0

    def __post_init__(self) -> None:
        """Validate horizon, warmup and replica counts."""
        if self.blocks < 1:
            raise InvalidParameterError("must be at least 1", "blocks", self.blocks)
        if not 0 <= self.warmup < self.blocks:
            raise InvalidParameterError("must satisfy 0 <= warmup < blocks", "warmup", self.warmup)
        if self.replicas < 1:
            raise InvalidParameterError("must be at least 1", "replicas", self.replicas)
        if not 0 <= self.seed < 2**64:
            raise InvalidParameterError("must be a 64-bit non-negative integer", "seed", self.seed)
        _positive("block_duration", self.block_duration)


def _json_float(value: float) -> float | None:
    return value if math.isfinite(value) else None


@dataclass
class SimReport:
    """Empirical queue and delay statistics of a simulation run."""

    mean_arrival: float
    mean_service: float
    queue_tail: list[tuple[float, float]]
    delay_tail: list[tuple[float, float]]
    fitted_decay: float
    zeta_hat: float
    ci_halfwidth: float
    stable: bool = True
    channel_on_fraction: float = math.nan
    source_on_fraction: float = math.nan
    delay_tail_se: list[float] = field(default_factory=list)
    blocks: int = 0
    replicas: int = 0

    def __post_init__(self) -> None:
        """Validate tail probabilities; an unstable report may carry a NaN zeta_hat."""
        if self.stable or not math.isnan(self.zeta_hat):
            _probability("zeta_hat", self.zeta_hat)
        for name, tail in (("queue_tail", self.queue_tail), ("delay_tail", self.delay_tail)):
            probabilities = [p for _, p in tail]
            for p in probabilities:
                _probability(name, p)
            if any(b > a + 1e-12 for a, b in zip(probabilities, probabilities[1:], strict=False)):
                raise InvalidParameterError("tail must be nonincreasing", name, probabilities)

    def to_dict(self) -> dict[str, Any]:
        """Convert the report to a JSON-safe dictionary."""
        return {
            "mean_arrival": self.mean_arrival,
            "mean_service": self.mean_service,
            "queue_tail": [list(point) for point in self.queue_tail],
            "delay_tail": [list(point) for point in self.delay_tail],
            "delay_tail_se": self.delay_tail_se,
            "fitted_decay": _json_float(self.fitted_decay),
            "zeta_hat": _json_float(self.zeta_hat),
            "ci_halfwidth": _json_float(self.ci_halfwidth),
            "stable": self.stable,
            "channel_on_fraction": _json_float(self.channel_on_fraction),
            "source_on_fraction": _json_float(self.source_on_fraction),
            "blocks": self.blocks,
            "replicas": self.replicas,
        }


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Point estimate with a normal-approximation confidence interval."""

    value: float
    stderr: float
    replicas: int
    horizon: float
    z: float = 1.96

    @property
    def ci_halfwidth(self) -> float:
        """Half-width of the confidence interval."""
        return self.z * self.stderr

    @property
    def ci(self) -> tuple[float, float]:
        """Confidence interval (low, high)."""
        return (self.value - self.ci_halfwidth, self.value + self.ci_halfwidth)

    def brackets(self, target: float, n_se: float = 3.0, atol: float = 1e-9) -> bool:
        """Check whether target lies within n_se standard errors, up to rounding ``atol``."""
        return abs(self.value - target) <= n_se * self.stderr + atol

    def to_dict(self) -> dict[str, float]:
        """Convert the estimate to a dictionary."""
        return {
            "value": self.value,
            "stderr": self.stderr,
            "ci_low": self.ci[0],
            "ci_high": self.ci[1],
            "replicas": self.replicas,
            "horizon": self.horizon,
        }
