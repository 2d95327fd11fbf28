"""Monte Carlo queue simulation and empirical estimators."""

from .queue_sim import (
    estimate_effective_bandwidth,
    estimate_effective_capacity,
    lindley,
    simulate,
    virtual_delays,
)
from .tail_fit import empirical_tail, fit_tail_decay

__all__ = [
    "empirical_tail",
    "estimate_effective_bandwidth",
    "estimate_effective_capacity",
    "fit_tail_decay",
    "lindley",
    "simulate",
    "virtual_delays",
]
