"""Analyzers for rate matching, rate optimization and delay QoS."""

from .qos_analysis import (
    TradeoffSweep,
    capacity_function,
    check_monotone,
    delay_violation,
    operating_exponent,
    required_theta,
    tradeoff_curve,
)
from .rate_matching import (
    invert_bandwidth,
    max_arrival,
    max_arrival_dtms,
    max_arrival_dtms_simplified,
    max_arrival_mfs,
    max_arrival_mmps,
    mmps_inversion_closed_form,
)
from .rate_optimizer import (
    capacity_rate_derivative,
    fixed_point_rate,
    foc_residual,
    foc_root,
    foc_sign_changes,
    max_search_rate,
    optimize_rate,
)

__all__ = [
    "TradeoffSweep",
    "capacity_function",
    "capacity_rate_derivative",
    "check_monotone",
    "delay_violation",
    "fixed_point_rate",
    "foc_residual",
    "foc_root",
    "foc_sign_changes",
    "invert_bandwidth",
    "max_arrival",
    "max_arrival_dtms",
    "max_arrival_dtms_simplified",
    "max_arrival_mfs",
    "max_arrival_mmps",
    "max_search_rate",
    "mmps_inversion_closed_form",
    "operating_exponent",
    "optimize_rate",
    "required_theta",
    "tradeoff_curve",
]
