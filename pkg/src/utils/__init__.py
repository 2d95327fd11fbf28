"""Numerical helpers, Markov path samplers and the config loader."""

from .config_loader import CONFIG_ENV_VAR, collect_grids, load_config_file, resolve_settings
from .markov_paths import (
    sample_block_on_times,
    sample_discrete_path,
    sample_occupation,
    sample_transitions,
)
from .numerics import find_root, golden_section_maximize, log_mean_exp, perron_pair
from .tilting import twist_generator, twist_kernel

__all__ = [
    "CONFIG_ENV_VAR",
    "collect_grids",
    "find_root",
    "golden_section_maximize",
    "load_config_file",
    "log_mean_exp",
    "perron_pair",
    "resolve_settings",
    "sample_block_on_times",
    "sample_discrete_path",
    "sample_occupation",
    "sample_transitions",
    "twist_generator",
    "twist_kernel",
]
