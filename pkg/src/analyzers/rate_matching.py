#!/usr/bin/env python3
"""Maximum supportable arrival rates from the matching condition a(theta) = C_E.

Closed forms are provided for the discrete-time and fluid sources. The
Poisson source is inverted numerically; a second closed form for it is
reported with its own residual so the two can be compared.
"""

import logging
import math

import numpy as np

from ..config import SearchBounds, Tolerances
from ..data.models import (
    BurstinessParam,
    DTMSSource,
    MatchMethod,
    MatchResult,
    MFSSource,
    MMPSSource,
    SourceFamily,
    ThetaLike,
    theta_value,
)
from ..exceptions import BracketFailureError, InvalidParameterError, NoSolutionError
from ..sources.dtms import dtms_steady_state_on
from ..sources.markov_sources import effective_bandwidth, parse_family
from ..sources.mmps import poisson_tilt_factor
from ..utils.numerics import find_root

logger = logging.getLogger(__name__)


def _check_capacity(c_e: float) -> float:
    if not (isinstance(c_e, int | float) and math.isfinite(c_e)) or c_e < 0:
        raise InvalidParameterError("must be a finite non-negative rate", "c_e", c_e)
    return float(c_e)


def _check_residual(result: MatchResult) -> MatchResult:
    if abs(result.residual) > Tolerances.MATCH_RESIDUAL * max(1.0, result.c_e):
        logger.warning(
            f"{result.family.value} match residual {result.residual:.3g} exceeds tolerance "
            f"(C_E={result.c_e:.6g}, theta={result.theta:.6g})"
        )
    return result


def max_arrival_dtms(p11: float, p22: float, c_e: float, theta: ThetaLike) -> MatchResult:
    """Solve the matching condition for a discrete-time Markov source.

    Evaluates lambda* = (1/theta) log[(e^{2 theta C} - p11 e^{theta C}) /
    ((1 - p11 - p22) + p22 e^{theta C})] as C plus a difference of log1p
    terms in expm1(-theta C), which keeps full precision as theta -> 0.

    Args:
        p11: Probability of staying OFF.
        p22: Probability of staying ON.
        c_e: Effective capacity of the service in bits/block.
        theta: QoS exponent.

    Returns:
        Closed-form MatchResult.

    Raises:
        DegenerateChainError: If both states are absorbing.
        NoSolutionError: If the chain never leaves OFF and never stays ON.
    """
    source = DTMSSource(p11=p11, p22=p22)
    theta = theta_value(theta)
    c_e = _check_capacity(c_e)
    p_on = dtms_steady_state_on(p11, p22)

    if c_e == 0.0:
        lambda_star = 0.0
    elif p11 == 1.0:
        if p22 == 0.0:
            raise NoSolutionError("source with p11=1 and p22=0 never emits; no rate matches C_E > 0")
        lambda_star = c_e - math.log(p22) / theta
    else:
        eps = math.expm1(-theta * c_e)
        stay = 1.0 - p11
        q = 1.0 - p11 - p22
        lambda_star = c_e + (math.log1p(-p11 * eps / stay) - math.log1p(q * eps / stay)) / theta

    if not math.isfinite(lambda_star) or lambda_star < 0:
        raise NoSolutionError(f"matching equation has no admissible root (lambda*={lambda_star!r})")

    residual = effective_bandwidth(source.with_lambda(lambda_star), theta) - c_e
    return _check_residual(
        MatchResult(
            lambda_on_star=lambda_star,
            lambda_avg_star=lambda_star * p_on,
            residual=residual,
            method=MatchMethod.CLOSED_FORM,
            family=SourceFamily.DTMS,
            c_e=c_e,
            theta=theta,
            p_on=p_on,
        )
    )


def max_arrival_dtms_simplified(
    s: BurstinessParam | float, c_e: float, theta: ThetaLike
) -> MatchResult:
    """Solve the matching condition for the burstiness form p11 = 1 - s, p22 = s.

    lambda*_avg = (s / theta) log[(e^{theta C} - (1 - s)) / s].
    """
    burstiness = s if isinstance(s, BurstinessParam) else BurstinessParam(s)
    s_value = burstiness.s
    theta = theta_value(theta)
    c_e = _check_capacity(c_e)

    exponent = theta * c_e
    if exponent <= 1.0:
        log_ratio = math.log1p(math.expm1(exponent) / s_value)
    else:
        log_ratio = exponent + math.log1p(-(1.0 - s_value) * math.exp(-exponent)) - math.log(s_value)

    lambda_star = log_ratio / theta
    source = burstiness.to_source(lambda_star)
    residual = effective_bandwidth(source, theta) - c_e
    return _check_residual(
        MatchResult(
            lambda_on_star=lambda_star,
            lambda_avg_star=lambda_star * s_value,
            residual=residual,
            method=MatchMethod.CLOSED_FORM,
            family=SourceFamily.DTMS,
            c_e=c_e,
            theta=theta,
            p_on=s_value,
        )
    )


def max_arrival_mfs(alpha: float, beta: float, c_e: float, theta: ThetaLike) -> MatchResult:
    """Solve the matching condition for a Markov fluid source.

    lambda* = C (theta C + alpha + beta) / (theta C + alpha), and the average
    rate is P_ON lambda*.
    """
    source = MFSSource(alpha=alpha, beta=beta)
    theta = theta_value(theta)
    c_e = _check_capacity(c_e)
    p_on = alpha / (alpha + beta)

    theta_c = theta * c_e
    lambda_star = c_e * (theta_c + alpha + beta) / (theta_c + alpha)
    residual = effective_bandwidth(source.with_lambda(lambda_star), theta) - c_e
    return _check_residual(
        MatchResult(
            lambda_on_star=lambda_star,
            lambda_avg_star=lambda_star * p_on,
            residual=residual,
            method=MatchMethod.CLOSED_FORM,
            family=SourceFamily.MFS,
            c_e=c_e,
            theta=theta,
            p_on=p_on,
        )
    )


def mmps_inversion_closed_form(alpha: float, beta: float, c_e: float, theta: ThetaLike) -> float:
    """Return lambda* = theta C (theta C + alpha + beta) / ((e^theta - 1)(theta C + alpha)).

    This is the direct algebraic inversion of the Poisson bandwidth.
    """
    MMPSSource(alpha=alpha, beta=beta)
    theta = theta_value(theta)
    c_e = _check_capacity(c_e)
    theta_c = theta * c_e
    return theta_c * (theta_c + alpha + beta) / (poisson_tilt_factor(theta) * (theta_c + alpha))


def mmps_alternate_average(alpha: float, beta: float, c_e: float, theta: float) -> float:
    """Return the alternate closed form P_ON theta (theta C + k) C / ((e^theta - 1) theta C + alpha)."""
    p_on = alpha / (alpha + beta)
    theta_c = theta * c_e
    return p_on * theta * (theta_c + alpha + beta) * c_e / (poisson_tilt_factor(theta) * theta_c + alpha)


def _bisect_lambda(source_at: "_SourceFactory", c_e: float, theta: float, upper: float) -> float:
    def gap(lam: float) -> float:
        return effective_bandwidth(source_at(lam), theta) - c_e

    return find_root(
        gap,
        0.0,
        upper,
        xtol=np.finfo(float).tiny,
        method="bisect",
    )


class _SourceFactory:
    """Callable building a source of fixed chain parameters at a given lambda."""

    def __init__(self, family: SourceFamily, params: tuple[float, float]):
        first, second = params
        self.template: DTMSSource | MFSSource | MMPSSource
        if family is SourceFamily.DTMS:
            self.template = DTMSSource(p11=first, p22=second)
        elif family is SourceFamily.MFS:
            self.template = MFSSource(alpha=first, beta=second)
        else:
            self.template = MMPSSource(alpha=first, beta=second)

    def __call__(self, lambda_on: float) -> DTMSSource | MFSSource | MMPSSource:
        return self.template.with_lambda(lambda_on)


def max_arrival_mmps(alpha: float, beta: float, c_e: float, theta: ThetaLike) -> MatchResult:
    """Solve the matching condition for a Markov-modulated Poisson source.

    The authoritative value comes from bisection on the bandwidth in lambda
    over [0, 2 (theta C + alpha + beta) / (e^theta - 1)]. The alternate closed
    form is attached as ``alternate_lambda_avg`` with its residual.
    """
    source = MMPSSource(alpha=alpha, beta=beta)
    theta = theta_value(theta)
    c_e = _check_capacity(c_e)
    p_on = alpha / (alpha + beta)

    if c_e == 0.0:
        return MatchResult(
            lambda_on_star=0.0,
            lambda_avg_star=0.0,
            residual=0.0,
            method=MatchMethod.BISECTION,
            family=SourceFamily.MMPS,
            c_e=0.0,
            theta=theta,
            p_on=p_on,
            alternate_lambda_avg=0.0,
            alternate_residual=0.0,
        )

    upper = 2.0 * (theta * c_e + alpha + beta) / poisson_tilt_factor(theta)
    if not (math.isfinite(upper) and upper > 0):
        raise BracketFailureError("Poisson inversion bracket is not representable", 0.0, upper)

    lambda_star = _bisect_lambda(_SourceFactory(SourceFamily.MMPS, (alpha, beta)), c_e, theta, upper)
    residual = effective_bandwidth(source.with_lambda(lambda_star), theta) - c_e

    alternate_avg = mmps_alternate_average(alpha, beta, c_e, theta)
    alternate_residual = effective_bandwidth(source.with_lambda(alternate_avg / p_on), theta) - c_e
    logger.debug(
        f"MMPS match: inversion lambda_avg={lambda_star * p_on:.10g}, "
        f"alternate form {alternate_avg:.10g} (residual {alternate_residual:.3g})"
    )
    return _check_residual(
        MatchResult(
            lambda_on_star=lambda_star,
            lambda_avg_star=lambda_star * p_on,
            residual=residual,
            method=MatchMethod.BISECTION,
            family=SourceFamily.MMPS,
            c_e=c_e,
            theta=theta,
            p_on=p_on,
            alternate_lambda_avg=alternate_avg,
            alternate_residual=alternate_residual,
        )
    )


def invert_bandwidth(
    source_family: str | SourceFamily,
    params: tuple[float, float],
    c_e: float,
    theta: ThetaLike,
) -> MatchResult:
    """Solve a(theta; lambda) = C_E for lambda by bracketed bisection.

    This is the family-independent oracle for the closed forms.

    Args:
        source_family: "dtms", "mfs" or "mmps".
        params: (p11, p22) for DTMS, (alpha, beta) otherwise.
        c_e: Effective capacity in bits/block.
        theta: QoS exponent.

    Returns:
        MatchResult with method=bisection.

    Raises:
        BracketFailureError: If no upper bracket is found below the overflow guard.
    """
    family = parse_family(source_family)
    factory = _SourceFactory(family, params)
    theta = theta_value(theta)
    c_e = _check_capacity(c_e)
    p_on = _family_p_on(family, params)

    if c_e == 0.0:
        lambda_star = 0.0
    else:
        upper = 2.0 * max(c_e, 1.0)
        value = effective_bandwidth(factory(upper), theta)
        while value < c_e:
            if upper > SearchBounds.LAMBDA_MAX:
                raise BracketFailureError(
                    "effective bandwidth never reaches C_E", 0.0, upper, -c_e, value - c_e
                )
            upper *= 2.0
            value = effective_bandwidth(factory(upper), theta)
        lambda_star = _bisect_lambda(factory, c_e, theta, upper)

    residual = effective_bandwidth(factory(lambda_star), theta) - c_e
    return _check_residual(
        MatchResult(
            lambda_on_star=lambda_star,
            lambda_avg_star=lambda_star * p_on,
            residual=residual,
            method=MatchMethod.BISECTION,
            family=family,
            c_e=c_e,
            theta=theta,
            p_on=p_on,
        )
    )


def _family_p_on(family: SourceFamily, params: tuple[float, float]) -> float:
    first, second = params
    if family is SourceFamily.DTMS:
        return dtms_steady_state_on(first, second)
    return first / (first + second)


def max_arrival(
    source_family: str | SourceFamily,
    params: tuple[float, float],
    c_e: float,
    theta: ThetaLike,
) -> MatchResult:
    """Dispatch to the authoritative matching method of a family."""
    family = parse_family(source_family)
    first, second = params
    if family is SourceFamily.DTMS:
        return max_arrival_dtms(first, second, c_e, theta)
    if family is SourceFamily.MFS:
        return max_arrival_mfs(first, second, c_e, theta)
    return max_arrival_mmps(first, second, c_e, theta)
