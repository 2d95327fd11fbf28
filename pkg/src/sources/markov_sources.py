#!/usr/bin/env python3
"""Family-independent entry points for the Markov arrival models."""

import logging

from ..config import SourceDefaults
from ..data.models import (
    BurstinessParam,
    DTMSSource,
    MFSSource,
    MMPSSource,
    SourceFamily,
    SourceModel,
    ThetaLike,
)
from ..exceptions import InvalidParameterError
from .base import BaseArrivalModel
from .dtms import DTMSArrivals
from .fluid import MFSArrivals
from .mmps import MMPSArrivals

logger = logging.getLogger(__name__)

ARRIVAL_MODELS: dict[SourceFamily, type[BaseArrivalModel]] = {
    SourceFamily.DTMS: DTMSArrivals,
    SourceFamily.MFS: MFSArrivals,
    SourceFamily.MMPS: MMPSArrivals,
}


def arrival_model(source: SourceModel) -> BaseArrivalModel:
    """Wrap a source in the arrival model of its family."""
    return ARRIVAL_MODELS[source.family](source)


def steady_state_on(source: SourceModel) -> float:
    """Return the stationary ON probability of a source."""
    return arrival_model(source).steady_state_on()


def effective_bandwidth(source: SourceModel, theta: ThetaLike) -> float:
    """Return the effective bandwidth a(theta) of a source in bits/block."""
    return arrival_model(source).effective_bandwidth(theta)


def mean_rate(source: SourceModel) -> float:
    """Return the average arrival rate lambda P_ON."""
    return arrival_model(source).mean_rate()


def parse_family(family: str | SourceFamily) -> SourceFamily:
    """Resolve a family name such as "dtms" to its enum member."""
    if isinstance(family, SourceFamily):
        return family
    try:
        return SourceFamily(family.lower())
    except ValueError as e:
        raise InvalidParameterError(
            f"unknown source family, expected one of {[f.value for f in SourceFamily]}",
            "family",
            family,
        ) from e


def source_for_p_on(
    family: str | SourceFamily,
    p_on: float,
    lambda_on: float = SourceDefaults.LAMBDA_ON,
    total_rate: float = SourceDefaults.TOTAL_RATE,
) -> SourceModel:
    """Build a source of the given family with stationary ON probability p_on.

    DTMS sources use the burstiness form s = p_on; fluid and Poisson sources
    use alpha + beta = total_rate.
    """
    family = parse_family(family)
    if family is SourceFamily.DTMS:
        return BurstinessParam(p_on).to_source(lambda_on)
    if family is SourceFamily.MFS:
        return MFSSource.from_p_on(p_on, lambda_on, total_rate)
    return MMPSSource.from_p_on(p_on, lambda_on, total_rate)


def source_parameters(source: SourceModel) -> tuple[float, float]:
    """Return the two chain parameters (p11, p22) or (alpha, beta) of a source."""
    if isinstance(source, DTMSSource):
        return (source.p11, source.p22)
    return (source.alpha, source.beta)
