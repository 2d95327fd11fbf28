"""Channel models: the fixed-rate ON/OFF service chain and its effective capacity."""

from .effective_capacity import (
    block_effective_capacity,
    capacity_lower_limit,
    capacity_upper_bound,
    effective_capacity,
    effective_capacity_value,
)
from .markov_channel import (
    db_to_linear,
    derive_chain,
    discretize,
    generator_matrix,
    instantaneous_capacity,
    is_on,
    kernel_array,
    linear_to_db,
)

__all__ = [
    "block_effective_capacity",
    "capacity_lower_limit",
    "capacity_upper_bound",
    "db_to_linear",
    "derive_chain",
    "discretize",
    "effective_capacity",
    "effective_capacity_value",
    "generator_matrix",
    "instantaneous_capacity",
    "is_on",
    "kernel_array",
    "linear_to_db",
]
