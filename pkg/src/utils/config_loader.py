"""Structured configuration loader.

Settings are merged with the precedence built-in defaults < JSON config file
< command-line flags. The config file is taken from ``--config`` or, when the
flag is absent, from the ``QOSRATE_CONFIG`` environment variable.
"""

import json
import logging
import os
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from ..config import ChannelDefaults, SimulationDefaults, SourceDefaults
from ..exceptions import InvalidParameterError

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "QOSRATE_CONFIG"

DEFAULTS: dict[str, Any] = {
    "gamma": ChannelDefaults.GAMMA,
    "rate": ChannelDefaults.RATE,
    "kappa": ChannelDefaults.KAPPA,
    "theta": ChannelDefaults.THETA,
    "block_duration": ChannelDefaults.BLOCK_DURATION,
    "source": "dtms",
    "p_on": SourceDefaults.P_ON,
    "total_rate": SourceDefaults.TOTAL_RATE,
    "lambda": SourceDefaults.LAMBDA_ON,
    "zeta": 1.0,
    "seed": SimulationDefaults.SEED,
    "blocks": SimulationDefaults.BLOCKS,
    "warmup": SimulationDefaults.WARMUP,
    "replicas": SimulationDefaults.REPLICAS,
    "workers": 1,
    "format": "csv",
}

# Keys accepted in a config file in addition to DEFAULTS
OPTIONAL_KEYS = frozenset(
    {
        "gamma_db",
        "p11",
        "p22",
        "alpha",
        "beta",
        "s",
        "c_e",
        "d",
        "epsilon",
        "bandwidth",
        "fixed_rate",
        "out",
        "experiment",
        "grids",
        "families",
        "delays",
        "design_theta",
        "arrival_rate",
    }
)

CONFIG_KEYS = frozenset(DEFAULTS) | OPTIONAL_KEYS

# Top-level shortcuts for single sweep grids
GRID_KEYS = ("families", "delays")


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read and validate a JSON config file.

    Args:
        path: Path to a JSON object whose keys are documented settings.

    Returns:
        The settings found in the file.

    Raises:
        InvalidParameterError: If the file is missing, malformed or has unknown keys.
    """
    config_path = Path(path)
    if not config_path.is_file():
        raise InvalidParameterError("config file not found", "config", str(config_path))

    try:
        with open(config_path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidParameterError(f"config file is not valid JSON: {e}", "config", str(config_path)) from e

    if not isinstance(data, dict):
        raise InvalidParameterError("config file must hold a JSON object", "config", str(config_path))

    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise InvalidParameterError(f"unknown config keys {unknown}", "config", str(config_path))

    logger.debug(f"Loaded {len(data)} settings from {config_path}")
    return data


def resolve_settings(
    flags: Mapping[str, Any], config_path: str | Path | None = None
) -> dict[str, Any]:
    """Merge defaults, the config file and explicit flags.

    Args:
        flags: Command-line values; entries that are None were not given.
        config_path: Explicit config file, overriding the environment variable.

    Returns:
        The merged settings.
    """
    settings = dict(DEFAULTS)

    path = config_path or os.environ.get(CONFIG_ENV_VAR)
    if path:
        settings.update(load_config_file(path))

    settings.update({key: value for key, value in flags.items() if value is not None})
    return settings


def collect_grids(settings: Mapping[str, Any]) -> dict[str, Any]:
    """Merge sweep grids from the ``grids`` object, the grid shortcuts and ``--grid`` flags.

    Later sources win: ``grids`` < ``families``/``delays`` < repeated ``--grid NAME=...``.

    Raises:
        InvalidParameterError: If ``grids`` is not a JSON object.
    """
    configured = settings.get("grids") or {}
    if not isinstance(configured, Mapping):
        raise InvalidParameterError("must be an object of grid names to values", "grids", configured)

    grids = dict(configured)
    grids.update({key: settings[key] for key in GRID_KEYS if settings.get(key) is not None})
    grids.update(dict(settings.get("grid") or []))
    return grids
