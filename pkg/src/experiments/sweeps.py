#!/usr/bin/env python3
"""Parameter sweeps regenerating the figure data as tables.

Each experiment evaluates a list of grid points, one row (or a block of
rows) per point, with all inputs and outputs in the row. Points may run
concurrently; rows are always ordered by grid index. A point that raises
a QoSProvisioningError becomes a failure record instead of aborting the
sweep, and the partial table is still written.
"""

import itertools
import logging
import math
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ..analyzers.qos_analysis import TradeoffSweep, check_monotone, tradeoff_curve
from ..analyzers.rate_matching import max_arrival
from ..analyzers.rate_optimizer import optimize_rate
from ..channel.effective_capacity import effective_capacity
from ..channel.markov_channel import db_to_linear, derive_chain
from ..config import ChannelDefaults, ExportColumns, SourceDefaults, SweepDefaults
from ..data.models import ChannelSpec, MatchResult, SourceFamily
from ..exceptions import InvalidParameterError, QoSProvisioningError
from ..sources.markov_sources import parse_family, source_for_p_on, source_parameters
from .output import OutputFormat, write_sweep_output

logger = logging.getLogger(__name__)


class Experiment(Enum):
    """Available sweep experiments."""

    FIG2_RATE_SWEEP = "fig2_rate_sweep"
    FIG3_KAPPA_SWEEP = "fig3_kappa_sweep"
    FIG4_GAMMA_SWEEP = "fig4_gamma_sweep"
    FIG5_THETA_SWEEP = "fig5_theta_sweep"
    FIG6_DELAY_TRADEOFF = "fig6_delay_tradeoff"
    FIG7_ARRIVAL_VS_PON = "fig7_arrival_vs_pon"
    CUSTOM = "custom"


GridValues = tuple[float, ...] | tuple[str, ...]


def linear_range(start: float, stop: float, points: int) -> tuple[float, ...]:
    """Return ``points`` evenly spaced values from start to stop inclusive."""
    _check_range(start, stop, points)
    return tuple(float(x) for x in np.linspace(start, stop, points))


def log_range(start: float, stop: float, points: int) -> tuple[float, ...]:
    """Return ``points`` log-spaced values from start to stop inclusive."""
    if start <= 0:
        raise InvalidParameterError("log range must start above 0", "start", start)
    _check_range(start, stop, points)
    return tuple(float(x) for x in np.geomspace(start, stop, points))


def step_range(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Return start, start + step, ... up to stop inclusive.

    Values are rounded to 12 decimals so that a step such as 0.05 lands
    exactly on the decimal grid.
    """
    if not step > 0:
        raise InvalidParameterError("step must be positive", "step", step)
    count = math.floor((stop - start) / step + 1e-9) + 1
    _check_range(start, stop, count)
    return tuple(round(start + i * step, 12) for i in range(count))


def _check_range(start: float, stop: float, points: int) -> None:
    if not (math.isfinite(start) and math.isfinite(stop)) or start > stop:
        raise InvalidParameterError("range must be finite and well-ordered", "range", (start, stop))
    if points < 1 or (points > 1 and start == stop):
        raise InvalidParameterError("range must hold at least one distinct point", "points", points)


def parse_grid(name: str, value: Any) -> GridValues:
    """Normalise a grid given as a list, a scalar or a range object.

    Range objects are mappings with ``start`` and ``stop`` and either
    ``step`` or ``points``; ``"scale": "log"`` selects log spacing.

    Args:
        name: Grid name, used in error messages.
        value: Raw grid description.

    Returns:
        The grid as a tuple of floats, or of family names for ``families``.
    """
    if name == "families":
        items = [value] if isinstance(value, str) else list(value)
        return tuple(parse_family(item).value for item in items)

    if isinstance(value, Mapping):
        try:
            start, stop = float(value["start"]), float(value["stop"])
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidParameterError("range needs numeric start and stop", name, value) from e
        if "step" in value:
            return step_range(start, stop, float(value["step"]))
        points = int(value.get("points", 2))
        if value.get("scale", "linear") == "log":
            return log_range(start, stop, points)
        return linear_range(start, stop, points)

    items = [value] if isinstance(value, int | float) else list(value)
    try:
        grid = tuple(float(item) for item in items)
    except (TypeError, ValueError) as e:
        raise InvalidParameterError("grid values must be numbers", name, value) from e
    if not all(math.isfinite(x) for x in grid):
        raise InvalidParameterError("grid values must be finite", name, value)
    return grid


def default_grids(experiment: Experiment) -> dict[str, GridValues]:
    """Return the default grids of a figure experiment."""
    families = SweepDefaults.FAMILIES
    if experiment is Experiment.FIG2_RATE_SWEEP:
        return {
            "rate": step_range(
                SweepDefaults.FIG2_RATE_START,
                SweepDefaults.FIG2_RATE_STOP,
                SweepDefaults.FIG2_RATE_STEP,
            ),
            "families": families,
        }
    if experiment is Experiment.FIG3_KAPPA_SWEEP:
        return {
            "kappa": log_range(*SweepDefaults.FIG3_KAPPA_RANGE, SweepDefaults.FIG3_KAPPA_POINTS),
            "gamma": SweepDefaults.FIG3_GAMMAS,
            "theta": SweepDefaults.FIG3_THETAS,
        }
    if experiment is Experiment.FIG4_GAMMA_SWEEP:
        return {
            "gamma_db": linear_range(*SweepDefaults.FIG4_GAMMA_DB_RANGE, SweepDefaults.FIG4_POINTS),
            "p_on": SweepDefaults.P_ON_VALUES,
            "families": families,
        }
    if experiment is Experiment.FIG5_THETA_SWEEP:
        return {
            "theta": log_range(*SweepDefaults.FIG5_THETA_RANGE, SweepDefaults.FIG5_POINTS),
            "p_on": SweepDefaults.P_ON_VALUES,
            "families": families,
        }
    if experiment is Experiment.FIG6_DELAY_TRADEOFF:
        return {
            "gamma": linear_range(1.0, 100.0, SweepDefaults.FIG6_POINTS),
            "theta": log_range(1e-2, 10.0, SweepDefaults.FIG6_POINTS),
            "p_on": linear_range(*SweepDefaults.FIG6_P_ON_RANGE, SweepDefaults.FIG6_POINTS),
            "delays": SweepDefaults.FIG6_DELAYS,
            "families": families,
        }
    if experiment is Experiment.FIG7_ARRIVAL_VS_PON:
        return {
            "c_e": SweepDefaults.FIG7_CAPACITIES,
            "p_on": linear_range(*SweepDefaults.FIG7_P_ON_RANGE, SweepDefaults.FIG7_POINTS),
            "families": families,
        }
    return {}


# Grids a custom sweep may span; their cartesian product is evaluated
CUSTOM_AXES = ("gamma", "rate", "kappa", "theta", "p_on", "families")


@dataclass(frozen=True)
class SweepSpec:
    """A sweep request: experiment, grids, scalar parameters and output."""

    experiment: Experiment
    grids: dict[str, GridValues] = field(default_factory=dict)
    out: Path | None = None
    format: OutputFormat = OutputFormat.CSV
    params: dict[str, Any] = field(default_factory=dict)
    fixed_rate: float | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        """Validate grids and options."""
        if self.experiment is Experiment.CUSTOM:
            missing = [axis for axis in ("gamma", "rate", "kappa", "theta") if axis not in self.grids]
            if missing:
                raise InvalidParameterError("custom sweep needs grids for every channel axis", "grids", missing)
            unknown = sorted(set(self.grids) - set(CUSTOM_AXES))
            if unknown:
                raise InvalidParameterError("unknown custom grid axes", "grids", unknown)
        for name, values in self.grids.items():
            if len(values) == 0:
                raise InvalidParameterError("grid must not be empty", name, values)
        if self.workers < 1:
            raise InvalidParameterError("must be at least 1", "workers", self.workers)
        if self.fixed_rate is not None and not self.fixed_rate >= 0:
            raise InvalidParameterError("must be non-negative", "fixed_rate", self.fixed_rate)

    @classmethod
    def build(
        cls,
        experiment: Experiment | str,
        grids: Mapping[str, Any] | None = None,
        **kwargs: Any,
    ) -> "SweepSpec":
        """Build a spec, filling in default grids and parsing range objects."""
        experiment = Experiment(experiment)
        merged: dict[str, GridValues] = default_grids(experiment)
        for name, value in (grids or {}).items():
            merged[name] = parse_grid(name, value)
        if "format" in kwargs:
            kwargs["format"] = OutputFormat(kwargs["format"])
        return cls(experiment=experiment, grids=merged, **kwargs)

    def param(self, name: str, default: Any) -> Any:
        """Scalar parameter with a fallback."""
        value = self.params.get(name)
        return default if value is None else value

    def to_dict(self) -> dict[str, Any]:
        """Describe the sweep for the run manifest."""
        return {
            "experiment": self.experiment.value,
            "grids": {name: list(values) for name, values in self.grids.items()},
            "format": self.format.value,
            "params": dict(self.params),
            "fixed_rate": self.fixed_rate,
            "workers": self.workers,
        }


@dataclass
class SweepResult:
    """Outcome of a sweep."""

    frame: pd.DataFrame
    failures: list[dict[str, Any]]
    path: Path | None = None
    manifest: Path | None = None

    @property
    def ok(self) -> bool:
        """True if every grid point evaluated."""
        return not self.failures


Rows = list[dict[str, Any]]
PointTask = tuple[dict[str, Any], Callable[[], Rows]]


def failure_record(index: int, point: Mapping[str, Any], error: Exception) -> dict[str, Any]:
    """Machine-readable record of a failed grid point."""
    return {
        "grid_index": index,
        "point": dict(point),
        "error": type(error).__name__,
        "message": str(error),
    }


def _evaluate(tasks: Sequence[PointTask], workers: int) -> tuple[Rows, list[dict[str, Any]]]:
    """Run point tasks, returning rows in grid order and failure records."""

    def run(task: PointTask) -> Rows | Exception:
        _, func = task
        try:
            return func()
        except QoSProvisioningError as e:
            return e

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(run, tasks))
    else:
        outcomes = [run(task) for task in tasks]

    rows: Rows = []
    failures: list[dict[str, Any]] = []
    for index, ((point, _), outcome) in enumerate(zip(tasks, outcomes, strict=True)):
        if isinstance(outcome, Exception):
            logger.warning(f"Grid point {index} {point} failed: {outcome}")
            failures.append(failure_record(index, point, outcome))
        else:
            rows.extend(outcome)
    return rows, failures


def _link_rate(spec: SweepSpec, gamma: float, kappa: float, theta: float) -> float:
    if spec.fixed_rate is not None:
        return spec.fixed_rate
    return optimize_rate(gamma, kappa, theta).r_star


def _match_row(
    index: int,
    channel: ChannelSpec,
    theta: float,
    family: str,
    p_on: float,
    total_rate: float,
) -> dict[str, Any]:
    """Evaluate C_E at a channel point and match a source of the family to it."""
    capacity = effective_capacity(channel, theta)
    source = source_for_p_on(family, p_on, SourceDefaults.LAMBDA_ON, total_rate)
    match: MatchResult = max_arrival(family, source_parameters(source), capacity.value, theta)
    return {
        ExportColumns.GRID_INDEX: index,
        ExportColumns.GAMMA: channel.gamma,
        ExportColumns.RATE: channel.rate,
        ExportColumns.KAPPA: channel.kappa,
        ExportColumns.THETA: theta,
        ExportColumns.P_ON_CHANNEL: derive_chain(channel).p_on,
        ExportColumns.C_E: capacity.value,
        ExportColumns.UPPER_BOUND: capacity.upper_bound,
        ExportColumns.FAMILY: match.family.value,
        ExportColumns.P_ON_SOURCE: match.p_on,
        ExportColumns.LAMBDA_ON_STAR: match.lambda_on_star,
        ExportColumns.LAMBDA_AVG_STAR: match.lambda_avg_star,
        ExportColumns.RESIDUAL: match.residual,
        ExportColumns.METHOD: match.method.value,
    }


def _fig2_tasks(spec: SweepSpec) -> list[PointTask]:
    gamma = float(spec.param("gamma", ChannelDefaults.GAMMA))
    kappa = float(spec.param("kappa", ChannelDefaults.KAPPA))
    theta = float(spec.param("theta", ChannelDefaults.THETA))
    p_on = float(spec.param("p_on", SourceDefaults.P_ON))
    total_rate = float(spec.param("total_rate", SourceDefaults.TOTAL_RATE))

    tasks: list[PointTask] = []
    for index, (family, rate) in enumerate(itertools.product(spec.grids["families"], spec.grids["rate"])):
        channel_point = {"gamma": gamma, "rate": rate, "kappa": kappa}

        def func(index: int = index, family: str = str(family), point: dict[str, Any] = channel_point) -> Rows:
            return [_match_row(index, ChannelSpec(**point), theta, family, p_on, total_rate)]

        tasks.append(({"family": family, "rate": rate}, func))
    return tasks


def _mark_family_argmax(frame: pd.DataFrame) -> pd.DataFrame:
    """Flag the rate maximising lambda_avg* within each family."""
    frame[ExportColumns.IS_FAMILY_ARGMAX] = False
    if frame.empty:
        return frame
    best = frame.groupby(ExportColumns.FAMILY, sort=False)[ExportColumns.LAMBDA_AVG_STAR].idxmax()
    frame.loc[best.to_numpy(), ExportColumns.IS_FAMILY_ARGMAX] = True
    return frame


def _fig3_tasks(spec: SweepSpec) -> list[PointTask]:
    rate = float(spec.param("rate", SweepDefaults.FIG3_RATE))
    tasks: list[PointTask] = []
    points = itertools.product(spec.grids["gamma"], spec.grids["theta"], spec.grids["kappa"])
    for index, (gamma, theta, kappa) in enumerate(points):
        point = {"gamma": gamma, "theta": theta, "kappa": kappa}

        def func(
            index: int = index,
            gamma: float = float(gamma),
            theta: float = float(theta),
            kappa: float = float(kappa),
        ) -> Rows:
            channel = ChannelSpec(gamma=gamma, rate=rate, kappa=kappa)
            capacity = effective_capacity(channel, theta)
            return [
                {
                    ExportColumns.GRID_INDEX: index,
                    ExportColumns.GAMMA: gamma,
                    ExportColumns.RATE: rate,
                    ExportColumns.KAPPA: kappa,
                    ExportColumns.THETA: theta,
                    ExportColumns.P_ON_CHANNEL: derive_chain(channel).p_on,
                    ExportColumns.C_E: capacity.value,
                    ExportColumns.UPPER_BOUND: capacity.upper_bound,
                }
            ]

        tasks.append((point, func))
    return tasks


def _optimized_match_tasks(spec: SweepSpec, axis: str) -> list[PointTask]:
    """Tasks for sweeps over gamma (in dB) or theta with the rate optimised per point."""
    kappa = float(spec.param("kappa", ChannelDefaults.KAPPA))
    total_rate = float(spec.param("total_rate", SourceDefaults.TOTAL_RATE))
    tasks: list[PointTask] = []
    points = itertools.product(spec.grids["families"], spec.grids["p_on"], spec.grids[axis])
    for index, (family, p_on, value) in enumerate(points):
        if axis == "gamma_db":
            gamma, theta = db_to_linear(float(value)), float(spec.param("theta", ChannelDefaults.THETA))
        else:
            gamma, theta = float(spec.param("gamma", ChannelDefaults.GAMMA)), float(value)

        def func(
            index: int = index,
            family: str = str(family),
            p_on: float = float(p_on),
            gamma: float = gamma,
            theta: float = theta,
            value: float = float(value),
        ) -> Rows:
            rate = _link_rate(spec, gamma, kappa, theta)
            row = _match_row(index, ChannelSpec(gamma=gamma, rate=rate, kappa=kappa), theta, family, p_on, total_rate)
            if axis == "gamma_db":
                row[ExportColumns.GAMMA_DB] = value
            return [row]

        tasks.append(({"family": family, "p_on": p_on, axis: value}, func))
    return tasks


def _fig6_tasks(spec: SweepSpec) -> list[PointTask]:
    gamma = float(spec.param("gamma", ChannelDefaults.GAMMA))
    kappa = float(spec.param("kappa", ChannelDefaults.KAPPA))
    theta = float(spec.param("theta", ChannelDefaults.THETA))
    p_on = float(spec.param("p_on", SourceDefaults.P_ON))
    zeta = float(spec.param("zeta", 1.0))
    total_rate = float(spec.param("total_rate", SourceDefaults.TOTAL_RATE))
    delays = [float(d) for d in spec.grids["delays"]]

    tasks: list[PointTask] = []
    for family in spec.grids["families"]:
        source = source_for_p_on(str(family), p_on, SourceDefaults.LAMBDA_ON, total_rate)
        for panel in TradeoffSweep:
            values = [float(v) for v in spec.grids[panel.value]]

            def func(panel: TradeoffSweep = panel, values: list[float] = values, source: Any = source) -> Rows:
                frame = tradeoff_curve(
                    panel,
                    values,
                    source,
                    gamma=gamma,
                    kappa=kappa,
                    theta=theta,
                    rate=spec.fixed_rate,
                    delays=delays,
                    zeta=zeta,
                    design_theta=float(spec.param("design_theta", SweepDefaults.FIG6_DESIGN_THETA)),
                    arrival_rate=float(spec.param("arrival_rate", SweepDefaults.FIG6_ARRIVAL_RATE)),
                )
                records: Rows = frame.to_dict(orient="records")
                return records

            tasks.append(({"family": family, "panel": panel.value}, func))
    return tasks


def _fig7_tasks(spec: SweepSpec) -> list[PointTask]:
    theta = float(spec.param("theta", ChannelDefaults.THETA))
    total_rate = float(spec.param("total_rate", SourceDefaults.TOTAL_RATE))
    tasks: list[PointTask] = []
    points = itertools.product(spec.grids["families"], spec.grids["c_e"], spec.grids["p_on"])
    for index, (family, c_e, p_on) in enumerate(points):

        def func(
            index: int = index,
            family: str = str(family),
            c_e: float = float(c_e),
            p_on: float = float(p_on),
        ) -> Rows:
            source = source_for_p_on(family, p_on, SourceDefaults.LAMBDA_ON, total_rate)
            match = max_arrival(family, source_parameters(source), c_e, theta)
            return [
                {
                    ExportColumns.GRID_INDEX: index,
                    ExportColumns.THETA: theta,
                    ExportColumns.C_E: c_e,
                    ExportColumns.FAMILY: match.family.value,
                    ExportColumns.P_ON_SOURCE: match.p_on,
                    ExportColumns.LAMBDA_ON_STAR: match.lambda_on_star,
                    ExportColumns.LAMBDA_AVG_STAR: match.lambda_avg_star,
                    ExportColumns.RESIDUAL: match.residual,
                    ExportColumns.METHOD: match.method.value,
                }
            ]

        tasks.append(({"family": family, "c_e": c_e, "p_on": p_on}, func))
    return tasks


def _custom_tasks(spec: SweepSpec) -> list[PointTask]:
    total_rate = float(spec.param("total_rate", SourceDefaults.TOTAL_RATE))
    families = spec.grids.get("families", (SourceFamily.DTMS.value,))
    p_ons = spec.grids.get("p_on", (float(spec.param("p_on", SourceDefaults.P_ON)),))
    axes = [spec.grids["gamma"], spec.grids["rate"], spec.grids["kappa"], spec.grids["theta"], p_ons, families]

    tasks: list[PointTask] = []
    for index, (gamma, rate, kappa, theta, p_on, family) in enumerate(itertools.product(*axes)):
        point = {"gamma": gamma, "rate": rate, "kappa": kappa, "theta": theta, "p_on": p_on, "family": family}

        def func(index: int = index, point: dict[str, Any] = point) -> Rows:
            channel = ChannelSpec(gamma=float(point["gamma"]), rate=float(point["rate"]), kappa=float(point["kappa"]))
            return [
                _match_row(
                    index,
                    channel,
                    float(point["theta"]),
                    str(point["family"]),
                    float(point["p_on"]),
                    total_rate,
                )
            ]

        tasks.append((point, func))
    return tasks


def build_frame(spec: SweepSpec) -> tuple[pd.DataFrame, list[dict[str, Any]]]:
    """Evaluate a sweep in memory.

    Returns:
        Tuple of (table ordered by grid index, failure records).
    """
    experiment = spec.experiment
    if experiment is Experiment.FIG2_RATE_SWEEP:
        tasks, columns = _fig2_tasks(spec), ExportColumns.MATCH_ORDER
    elif experiment is Experiment.FIG3_KAPPA_SWEEP:
        tasks, columns = _fig3_tasks(spec), ExportColumns.CAPACITY_ORDER
    elif experiment is Experiment.FIG4_GAMMA_SWEEP:
        tasks = _optimized_match_tasks(spec, "gamma_db")
        columns = [*ExportColumns.MATCH_ORDER[:2], ExportColumns.GAMMA_DB, *ExportColumns.MATCH_ORDER[2:]]
    elif experiment is Experiment.FIG5_THETA_SWEEP:
        tasks, columns = _optimized_match_tasks(spec, "theta"), ExportColumns.MATCH_ORDER
    elif experiment is Experiment.FIG6_DELAY_TRADEOFF:
        tasks, columns = _fig6_tasks(spec), ExportColumns.TRADEOFF_ORDER
    elif experiment is Experiment.FIG7_ARRIVAL_VS_PON:
        tasks, columns = _fig7_tasks(spec), ExportColumns.ARRIVAL_ORDER
    else:
        tasks, columns = _custom_tasks(spec), ExportColumns.MATCH_ORDER

    logger.info(f"Running {experiment.value} over {len(tasks)} grid points")
    rows, failures = _evaluate(tasks, spec.workers)
    frame = pd.DataFrame(rows, columns=columns)

    if experiment is Experiment.FIG2_RATE_SWEEP:
        frame = _mark_family_argmax(frame)
    elif experiment is Experiment.FIG3_KAPPA_SWEEP:
        frame.attrs["monotone"] = check_monotone(
            frame,
            ExportColumns.C_E,
            ExportColumns.KAPPA,
            "nondecreasing",
            group_by=[ExportColumns.GAMMA, ExportColumns.THETA],
        )
    return frame, failures


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate a sweep and write its table and manifest when ``spec.out`` is set.

    Args:
        spec: Validated sweep request.

    Returns:
        SweepResult; ``ok`` is False when any grid point failed.
    """
    frame, failures = build_frame(spec)
    result = SweepResult(frame=frame, failures=failures)
    if spec.out is not None:
        result.path = spec.out
        result.manifest = write_sweep_output(
            frame, spec.out, spec.format, spec.experiment.value, spec.to_dict(), failures
        )
    return result
