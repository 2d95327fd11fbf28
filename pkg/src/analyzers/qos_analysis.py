#!/usr/bin/env python3
"""Delay-violation model and the reliability-latency tradeoff.

The delay-violation probability is approximated by
Pr{D >= d} ~ zeta exp(-theta a(theta) d), with a(theta) equal to C_E at the
matched operating point.
"""

import logging
import math
from collections.abc import Callable, Sequence
from enum import Enum

import pandas as pd

from ..channel.effective_capacity import effective_capacity
from ..config import ExportColumns, SearchBounds, SweepDefaults, Tolerances
from ..data.models import (
    ChannelSpec,
    DelayModel,
    DTMSSource,
    QosExponent,
    SourceModel,
    ThetaLike,
    theta_value,
)
from ..exceptions import (
    InfeasibleTargetError,
    InvalidParameterError,
    NoSolutionError,
    NumericalFailureError,
)
from ..sources.markov_sources import (
    effective_bandwidth,
    source_for_p_on,
    source_parameters,
    steady_state_on,
)
from ..utils.numerics import find_root
from .rate_matching import max_arrival
from .rate_optimizer import optimize_rate

logger = logging.getLogger(__name__)


class TradeoffSweep(Enum):
    """Parameter swept by a tradeoff curve."""

    GAMMA = "gamma"
    THETA = "theta"
    P_ON = "p_on"


def delay_violation(model: DelayModel, d: float) -> float:
    """Return min(1, zeta exp(-theta a d)) for a delay threshold d >= 0."""
    if not (math.isfinite(d) and d >= 0):
        raise InvalidParameterError("must be a finite non-negative delay", "d", d)
    return min(1.0, model.zeta * math.exp(-model.theta * model.bandwidth * d))


def capacity_function(spec: ChannelSpec) -> Callable[[float], float]:
    """Return theta -> C_E(theta) for a fixed channel."""

    def capacity(theta: float) -> float:
        return effective_capacity(spec, theta).value

    return capacity


def required_theta(
    spec: ChannelSpec, d: float, epsilon: float, zeta: float = 1.0
) -> QosExponent:
    """Find the smallest exponent meeting Pr{D >= d} <= epsilon on this channel.

    Solves zeta exp(-theta C_E(theta) d) = epsilon by bisection in log theta
    over [1e-8, 1e4]. Because theta C_E(theta) saturates at nu, small targets
    can be out of reach.

    Args:
        spec: Channel specification.
        d: Delay threshold in blocks (positive).
        epsilon: Target violation probability.
        zeta: Non-empty-buffer probability.

    Returns:
        The required QoS exponent.

    Raises:
        InfeasibleTargetError: If epsilon cannot be reached for any theta in the bracket.
    """
    if not (math.isfinite(d) and d > 0):
        raise InvalidParameterError("must be positive", "d", d)
    if not 0 < zeta <= 1:
        raise InvalidParameterError("must lie in (0, 1]", "zeta", zeta)
    if not 0 < epsilon <= zeta:
        raise InvalidParameterError("must satisfy 0 < epsilon <= zeta", "epsilon", epsilon)

    capacity = capacity_function(spec)
    target = math.log(zeta) - math.log(epsilon)

    def gap(log_theta: float) -> float:
        theta = math.exp(log_theta)
        return target - theta * capacity(theta) * d

    low, high = math.log(SearchBounds.THETA_MIN), math.log(SearchBounds.THETA_MAX)
    if gap(low) <= 0:
        return QosExponent(SearchBounds.THETA_MIN)
    if gap(high) > 0:
        raise InfeasibleTargetError(
            f"violation target {epsilon:.3g} at d={d:.6g} is unreachable: "
            f"theta*C_E saturates below {target / d:.6g}"
        )

    log_theta = find_root(gap, low, high, xtol=Tolerances.THETA_RELATIVE * 0.1, method="bisect")
    return QosExponent(math.exp(log_theta))


def operating_exponent(
    source: SourceModel, capacity: Callable[[float], float]
) -> float:
    """Solve a(theta) = C(theta) for the exponent at which a source is matched.

    Args:
        source: Arrival source with fixed rates.
        capacity: Map from theta to the service effective capacity.

    Returns:
        The operating exponent; THETA_MAX when the source is matched beyond the bracket.

    Raises:
        NoSolutionError: If the mean arrival rate already exceeds the mean service rate.
    """

    def gap(log_theta: float) -> float:
        theta = math.exp(log_theta)
        try:
            bandwidth = effective_bandwidth(source, theta)
        except NumericalFailureError:
            return math.inf
        return bandwidth - capacity(theta)

    low, high = math.log(SearchBounds.THETA_MIN), math.log(SearchBounds.THETA_MAX)
    if gap(low) >= 0:
        raise NoSolutionError("source mean rate is not below the service capacity; queue is unstable")
    if gap(high) < 0:
        logger.warning(
            f"Source is supported up to theta={SearchBounds.THETA_MAX:g}; "
            "returning the bracket limit as operating exponent"
        )
        return SearchBounds.THETA_MAX

    return math.exp(find_root(gap, low, high, xtol=Tolerances.THETA_RELATIVE * 0.1, method="bisect"))


def check_monotone(
    frame: pd.DataFrame,
    column: str,
    by: str,
    direction: str = "nonincreasing",
    group_by: Sequence[str] = (),
    rtol: float = 1e-9,
) -> bool:
    """Check that ``column`` is monotone in ``by`` within each group.

    Args:
        frame: Table to check.
        column: Column expected to be monotone.
        by: Column defining the order.
        direction: "nonincreasing" or "nondecreasing".
        group_by: Columns whose combinations are checked separately.
        rtol: Relative slack for rounding.

    Returns:
        True if every group is monotone; violations are logged.
    """
    sign = -1.0 if direction == "nonincreasing" else 1.0
    groups = frame.groupby(list(group_by), sort=False) if group_by else [((), frame)]
    monotone = True
    for key, group in groups:
        values = group.sort_values(by)[column].to_numpy(dtype=float)
        steps = sign * (values[1:] - values[:-1])
        slack = rtol * abs(values[:-1]) + 1e-300
        if (steps < -slack).any():
            monotone = False
            logger.warning(f"{column} is not {direction} in {by} for group {key}")
    return monotone


def _match_average(source: SourceModel, c_e: float, theta: float) -> float:
    try:
        return max_arrival(source.family, source_parameters(source), c_e, theta).lambda_avg_star
    except NoSolutionError as e:
        logger.warning(f"No matching rate at C_E={c_e:.6g}, theta={theta:.6g}: {e}")
        return math.nan


def _link_rate(gamma: float, kappa: float, theta: float, rate: float | None) -> float:
    if rate is not None:
        return rate
    return optimize_rate(gamma, kappa, theta).r_star


def tradeoff_curve(
    sweep: TradeoffSweep | str,
    values: Sequence[float],
    source: SourceModel,
    *,
    gamma: float = 10.0,
    kappa: float = 50.0,
    theta: ThetaLike = 1.0,
    rate: float | None = None,
    delays: Sequence[float] = SweepDefaults.FIG6_DELAYS,
    zeta: float = 1.0,
    design_theta: float = SweepDefaults.FIG6_DESIGN_THETA,
    arrival_rate: float = SweepDefaults.FIG6_ARRIVAL_RATE,
) -> pd.DataFrame:
    """Tabulate delay-violation probabilities along one swept parameter.

    For gamma and theta sweeps the source is matched to the link, so the
    exponent in the violation model is theta itself. For the P_ON sweep the
    source keeps an average rate of ``arrival_rate``; the link rate is set at
    ``design_theta`` and the violation uses the operating exponent solving
    a(theta) = C_E(theta).

    Args:
        sweep: Swept parameter.
        values: Grid of the swept parameter.
        source: Source whose family (and chain parameters) is used.
        gamma: Linear SNR when not swept.
        kappa: Channel memory decay rate.
        theta: QoS exponent when not swept.
        rate: Fixed link rate, or None to optimize it at every point.
        delays: Delay thresholds in blocks.
        zeta: Non-empty-buffer probability.
        design_theta: Exponent used to set the link rate in the P_ON sweep.
        arrival_rate: Average source rate in the P_ON sweep.

    Returns:
        Tidy table with one row per grid point and delay threshold.
    """
    sweep = TradeoffSweep(sweep)
    theta = theta_value(theta)
    if not values:
        raise InvalidParameterError("grid must not be empty", "values", values)

    total_rate = 10.0 if isinstance(source, DTMSSource) else source.alpha + source.beta
    rows: list[dict[str, object]] = []
    for index, value in enumerate(values):
        point_gamma, point_theta, point_source = gamma, theta, source
        if sweep is TradeoffSweep.GAMMA:
            point_gamma = float(value)
        elif sweep is TradeoffSweep.THETA:
            point_theta = theta_value(float(value))

        if sweep is TradeoffSweep.P_ON:
            p_on = float(value)
            point_source = source_for_p_on(source.family, p_on, arrival_rate / p_on, total_rate)
            link_rate = _link_rate(point_gamma, kappa, design_theta, rate)
            spec = ChannelSpec(gamma=point_gamma, rate=link_rate, kappa=kappa)
            exponent = operating_exponent(point_source, capacity_function(spec))
            c_e = effective_capacity(spec, exponent).value
            lambda_avg = arrival_rate
        else:
            link_rate = _link_rate(point_gamma, kappa, point_theta, rate)
            spec = ChannelSpec(gamma=point_gamma, rate=link_rate, kappa=kappa)
            exponent = point_theta
            c_e = effective_capacity(spec, exponent).value
            lambda_avg = _match_average(point_source, c_e, exponent)
            p_on = steady_state_on(point_source)

        model = DelayModel(theta=exponent, bandwidth=c_e, zeta=zeta)
        for d in delays:
            rows.append(
                {
                    ExportColumns.PANEL: sweep.value,
                    ExportColumns.GRID_INDEX: index,
                    ExportColumns.GAMMA: point_gamma,
                    ExportColumns.RATE: link_rate,
                    ExportColumns.KAPPA: kappa,
                    ExportColumns.THETA: point_theta if sweep is not TradeoffSweep.P_ON else design_theta,
                    ExportColumns.OPERATING_THETA: exponent,
                    ExportColumns.C_E: c_e,
                    ExportColumns.FAMILY: source.family.value,
                    ExportColumns.P_ON_SOURCE: p_on,
                    ExportColumns.LAMBDA_AVG_STAR: lambda_avg,
                    ExportColumns.ZETA: zeta,
                    ExportColumns.DELAY: float(d),
                    ExportColumns.VIOLATION: delay_violation(model, float(d)),
                }
            )

    frame = pd.DataFrame(rows, columns=ExportColumns.TRADEOFF_ORDER)
    by = {
        TradeoffSweep.GAMMA: ExportColumns.GAMMA,
        TradeoffSweep.THETA: ExportColumns.THETA,
        TradeoffSweep.P_ON: ExportColumns.P_ON_SOURCE,
    }[sweep]
    frame.attrs["monotone"] = check_monotone(
        frame, ExportColumns.VIOLATION, by, "nonincreasing", group_by=[ExportColumns.DELAY]
    )
    return frame
