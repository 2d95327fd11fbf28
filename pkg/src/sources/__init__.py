"""Markov ON/OFF arrival sources and their effective bandwidths."""

from .base import BaseArrivalModel
from .dtms import DTMSArrivals
from .fluid import MFSArrivals
from .markov_sources import (
    ARRIVAL_MODELS,
    arrival_model,
    effective_bandwidth,
    mean_rate,
    parse_family,
    source_for_p_on,
    source_parameters,
    steady_state_on,
)
from .mmps import MMPSArrivals

__all__ = [
    "ARRIVAL_MODELS",
    "BaseArrivalModel",
    "DTMSArrivals",
    "MFSArrivals",
    "MMPSArrivals",
    "arrival_model",
    "effective_bandwidth",
    "mean_rate",
    "parse_family",
    "source_for_p_on",
    "source_parameters",
    "steady_state_on",
]
