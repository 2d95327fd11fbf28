"""Command-line interface for the QoS provisioning toolkit.

Point queries print one JSON record on standard output; the ``sweep``
subcommand writes figure tables. Logging goes to standard error.
"""

import argparse
import json
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from . import exceptions
from .analyzers.qos_analysis import delay_violation, required_theta
from .analyzers.rate_matching import max_arrival
from .analyzers.rate_optimizer import optimize_rate
from .channel.effective_capacity import effective_capacity
from .channel.markov_channel import db_to_linear, derive_chain
from .config import ExitCodes
from .data.models import (
    BurstinessParam,
    ChannelSpec,
    DelayModel,
    DTMSSource,
    MFSSource,
    MMPSSource,
    SimConfig,
    SourceFamily,
    SourceModel,
)
from .data.versioning import get_version
from .exceptions import (
    InvalidParameterError,
    NoSolutionError,
    QoSProvisioningError,
)
from .experiments.output import report_tails_frame, write_table
from .experiments.sweeps import Experiment, SweepSpec, run_sweep
from .simulation.queue_sim import simulate
from .sources.markov_sources import effective_bandwidth, parse_family, source_for_p_on, source_parameters
from .utils.config_loader import collect_grids, resolve_settings

logger = logging.getLogger(__name__)

# Settings forwarded to sweeps as scalar parameters
SWEEP_PARAMS = (
    "gamma", "kappa", "theta", "rate", "p_on", "total_rate", "zeta", "design_theta", "arrival_rate",
)


def exit_code_for(error: BaseException | str) -> int:
    """Map an exception (or its class name) to a process exit code."""
    if isinstance(error, str):
        error_class = getattr(exceptions, error, QoSProvisioningError)
    else:
        error_class = type(error)
    if issubclass(error_class, InvalidParameterError):
        return ExitCodes.USAGE
    if issubclass(error_class, NoSolutionError):
        return ExitCodes.NO_SOLUTION
    return ExitCodes.NUMERICAL_FAILURE


def _json_safe(value: Any) -> Any:
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [_json_safe(item) for item in value]
    return value


def emit(record: dict[str, Any]) -> None:
    """Print one JSON record on standard output."""
    print(json.dumps(_json_safe(record), indent=2))


def _grid_arg(text: str) -> tuple[str, list[float | str]]:
    """Parse NAME=V1,V2,... into a grid entry."""
    name, sep, values = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=V1,V2,... but got {text!r}")
    items = [item.strip() for item in values.split(",") if item.strip()]
    if name == "families":
        return name, list(items)
    try:
        return name, [float(item) for item in items]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"grid {name} must hold numbers") from e


def create_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False)
    channel = common.add_argument_group("channel")
    snr = common.add_mutually_exclusive_group()
    snr.add_argument("--gamma", type=float, help="Average SNR (linear)")
    snr.add_argument("--gamma-db", dest="gamma_db", type=float, help="Average SNR in dB")
    channel.add_argument("--rate", type=float, help="Fixed transmission rate (bits per block)")
    channel.add_argument("--kappa", type=float, help="Channel memory decay rate (per block)")
    channel.add_argument("--theta", type=float, help="QoS exponent")
    channel.add_argument("--block-duration", dest="block_duration", type=float, help="Block duration T")

    source = common.add_argument_group("source")
    source.add_argument("--source", choices=[f.value for f in SourceFamily], help="Source family")
    source.add_argument("--p11", type=float, help="DTMS OFF->OFF probability")
    source.add_argument("--p22", type=float, help="DTMS ON->ON probability")
    source.add_argument("--alpha", type=float, help="OFF->ON rate of MFS/MMPS")
    source.add_argument("--beta", type=float, help="ON->OFF rate of MFS/MMPS")
    source.add_argument("--s", type=float, help="DTMS burstiness (P_ON = s)")
    source.add_argument("--p-on", dest="p_on", type=float, help="Source ON probability")
    source.add_argument("--lambda", dest="lambda", type=float, help="Peak arrival rate lambda")

    delay = common.add_argument_group("delay")
    delay.add_argument("--zeta", type=float, help="Non-empty buffer probability")
    delay.add_argument("--d", type=float, help="Delay threshold (blocks)")
    delay.add_argument("--epsilon", type=float, help="Target violation probability")
    delay.add_argument("--bandwidth", type=float, help="Effective bandwidth/capacity a(theta)")
    delay.add_argument("--c-e", dest="c_e", type=float, help="Effective capacity to match against")

    sim = common.add_argument_group("simulation")
    sim.add_argument("--seed", type=int, help="Random seed")
    sim.add_argument("--blocks", type=int, help="Simulated blocks per replica")
    sim.add_argument("--warmup", type=int, help="Discarded blocks per replica")
    sim.add_argument("--replicas", type=int, help="Independent replicas")
    sim.add_argument("--workers", type=int, help="Worker threads")

    out = common.add_argument_group("output")
    out.add_argument("--out", type=Path, help="Output data file")
    out.add_argument("--format", choices=["csv", "json"], help="Output file format")
    out.add_argument("--config", type=Path, help="JSON config file")
    out.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")

    parser = argparse.ArgumentParser(
        prog="qosrate",
        description="Fixed-rate QoS provisioning over a Markov ON/OFF fading channel",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_version()}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("capacity", parents=[common], help="Effective capacity C_E(R, theta)")
    subparsers.add_parser("bandwidth", parents=[common], help="Effective bandwidth of a source")
    subparsers.add_parser("match", parents=[common], help="Maximum supportable arrival rate")
    subparsers.add_parser("optimize", parents=[common], help="Throughput-optimal fixed rate")
    subparsers.add_parser("delay", parents=[common], help="Delay-violation probability")
    subparsers.add_parser("simulate", parents=[common], help="Monte Carlo queue simulation")

    sweep = subparsers.add_parser("sweep", parents=[common], help="Regenerate figure data")
    sweep.add_argument(
        "--experiment", choices=[e.value for e in Experiment], help="Experiment to run"
    )
    sweep.add_argument(
        "--grid",
        action="append",
        type=_grid_arg,
        default=None,
        metavar="NAME=V1,V2",
        help="Override one grid (repeatable)",
    )
    sweep.add_argument("--fixed-rate", dest="fixed_rate", type=float, help="Use this rate instead of optimizing")
    sweep.add_argument(
        "--design-theta", dest="design_theta", type=float, help="Exponent setting the link rate of the P_ON tradeoff panel"
    )
    sweep.add_argument(
        "--arrival-rate", dest="arrival_rate", type=float, help="Average source rate of the P_ON tradeoff panel"
    )
    return parser


def channel_from_settings(settings: dict[str, Any]) -> ChannelSpec:
    """Build the channel, converting a dB SNR when given."""
    gamma = settings["gamma"]
    if settings.get("gamma_db") is not None:
        gamma = db_to_linear(float(settings["gamma_db"]))
    return ChannelSpec(gamma=float(gamma), rate=float(settings["rate"]), kappa=float(settings["kappa"]))


def source_from_settings(settings: dict[str, Any]) -> SourceModel:
    """Build the arrival source from explicit chain parameters or from P_ON."""
    family = parse_family(settings["source"])
    lambda_on = float(settings["lambda"])
    if family is SourceFamily.DTMS:
        if settings.get("p11") is not None or settings.get("p22") is not None:
            if settings.get("p11") is None or settings.get("p22") is None:
                raise InvalidParameterError("give both --p11 and --p22", "p11", settings.get("p11"))
            return DTMSSource(float(settings["p11"]), float(settings["p22"]), lambda_on)
        if settings.get("s") is not None:
            return BurstinessParam(float(settings["s"])).to_source(lambda_on)
    elif settings.get("alpha") is not None or settings.get("beta") is not None:
        if settings.get("alpha") is None or settings.get("beta") is None:
            raise InvalidParameterError("give both --alpha and --beta", "alpha", settings.get("alpha"))
        source_class = MFSSource if family is SourceFamily.MFS else MMPSSource
        return source_class(float(settings["alpha"]), float(settings["beta"]), lambda_on)
    return source_for_p_on(family, float(settings["p_on"]), lambda_on, float(settings["total_rate"]))


def _parameters(settings: dict[str, Any], keys: Sequence[str]) -> dict[str, Any]:
    return {key: settings.get(key) for key in keys}


def run_capacity(settings: dict[str, Any]) -> dict[str, Any]:
    """Effective capacity of the channel at a fixed rate."""
    spec = channel_from_settings(settings)
    result = effective_capacity(spec, float(settings["theta"]))
    return {
        "parameters": {**spec.to_dict(), "theta": float(settings["theta"]), "gamma_db": settings.get("gamma_db")},
        "chain": derive_chain(spec).to_dict(),
        "result": result.to_dict(),
    }


def run_bandwidth(settings: dict[str, Any]) -> dict[str, Any]:
    """Effective bandwidth of the configured source."""
    source = source_from_settings(settings)
    theta = float(settings["theta"])
    return {
        "parameters": {**source.to_dict(), "theta": theta},
        "result": {"value": effective_bandwidth(source, theta)},
    }


def run_match(settings: dict[str, Any]) -> dict[str, Any]:
    """Match the source to a given C_E, or to the channel's C_E."""
    source = source_from_settings(settings)
    theta = float(settings["theta"])
    parameters: dict[str, Any] = {**source.to_dict(), "theta": theta}
    if settings.get("c_e") is not None:
        c_e = float(settings["c_e"])
    else:
        spec = channel_from_settings(settings)
        c_e = effective_capacity(spec, theta).value
        parameters.update(spec.to_dict())
    parameters["c_e"] = c_e
    match = max_arrival(source.family, source_parameters(source), c_e, theta)
    return {"parameters": parameters, "result": match.to_dict()}


def run_optimize(settings: dict[str, Any]) -> dict[str, Any]:
    """Throughput-optimal rate of the channel."""
    spec = channel_from_settings(settings)
    theta = float(settings["theta"])
    optimum = optimize_rate(spec.gamma, spec.kappa, theta)
    return {
        "parameters": {"gamma": spec.gamma, "kappa": spec.kappa, "theta": theta},
        "result": optimum.to_dict(),
    }


def run_delay(settings: dict[str, Any]) -> dict[str, Any]:
    """Delay-violation probability, or the exponent meeting a target with --epsilon."""
    zeta = float(settings["zeta"])
    d = settings.get("d")
    if d is None:
        raise InvalidParameterError("delay needs --d", "d", d)
    d = float(d)

    if settings.get("epsilon") is not None:
        spec = channel_from_settings(settings)
        epsilon = float(settings["epsilon"])
        theta = required_theta(spec, d, epsilon, zeta).theta
        c_e = effective_capacity(spec, theta).value
        return {
            "parameters": {**spec.to_dict(), "d": d, "epsilon": epsilon, "zeta": zeta},
            "result": {
                "theta": theta,
                "c_e": c_e,
                "violation": delay_violation(DelayModel(theta, c_e, zeta), d),
            },
        }

    theta = float(settings["theta"])
    parameters: dict[str, Any] = {"theta": theta, "zeta": zeta, "d": d}
    if settings.get("bandwidth") is not None:
        bandwidth = float(settings["bandwidth"])
    else:
        spec = channel_from_settings(settings)
        bandwidth = effective_capacity(spec, theta).value
        parameters.update(spec.to_dict())
    parameters["bandwidth"] = bandwidth
    violation = delay_violation(DelayModel(theta, bandwidth, zeta), d)
    return {"parameters": parameters, "result": {"violation": violation}}


def run_simulate(settings: dict[str, Any]) -> dict[str, Any]:
    """Simulate the queue and optionally write the tails table."""
    config = SimConfig(
        channel=channel_from_settings(settings),
        source=source_from_settings(settings),
        blocks=int(settings["blocks"]),
        warmup=int(settings["warmup"]),
        replicas=int(settings["replicas"]),
        seed=int(settings["seed"]),
        block_duration=float(settings["block_duration"]),
    )
    report = simulate(config, workers=int(settings["workers"]))
    record: dict[str, Any] = {
        "parameters": {
            **config.channel.to_dict(),
            **config.source.to_dict(),
            "blocks": config.blocks,
            "warmup": config.warmup,
            "replicas": config.replicas,
            "seed": config.seed,
            "block_duration": config.block_duration,
        },
        "result": report.to_dict(),
    }
    if settings.get("out") is not None and report.stable:
        record["output"] = str(write_table(report_tails_frame(report), Path(settings["out"]), settings["format"]))
    return record


def run_sweep_command(settings: dict[str, Any]) -> tuple[dict[str, Any], int]:
    """Run a figure sweep; failures turn into a non-zero exit code."""
    experiment = settings.get("experiment")
    if experiment is None:
        raise InvalidParameterError("sweep needs --experiment", "experiment", experiment)
    grids = collect_grids(settings)

    spec = SweepSpec.build(
        experiment,
        grids,
        out=Path(settings["out"]) if settings.get("out") is not None else None,
        format=settings["format"],
        params=_parameters(settings, SWEEP_PARAMS),
        fixed_rate=settings.get("fixed_rate"),
        workers=int(settings["workers"]),
    )
    result = run_sweep(spec)
    record = {
        "parameters": spec.to_dict(),
        "result": {
            "rows": len(result.frame),
            "output": str(result.path) if result.path else None,
            "manifest": str(result.manifest) if result.manifest else None,
            "failures": result.failures,
        },
    }
    if result.ok:
        return record, ExitCodes.SUCCESS
    for failure in result.failures:
        print(json.dumps(_json_safe(failure)), file=sys.stderr)
    return record, exit_code_for(result.failures[0]["error"])


HANDLERS = {
    "capacity": run_capacity,
    "bandwidth": run_bandwidth,
    "match": run_match,
    "optimize": run_optimize,
    "delay": run_delay,
    "simulate": run_simulate,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point for the application.

    Args:
        argv: Arguments without the program name; defaults to sys.argv.

    Returns:
        Process exit code.
    """
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else ExitCodes.USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    flags = {key: value for key, value in vars(args).items() if key not in ("command", "config", "verbose")}
    try:
        settings = resolve_settings(flags, args.config)
        if args.command == "sweep":
            record, code = run_sweep_command(settings)
        else:
            record, code = HANDLERS[args.command](settings), ExitCodes.SUCCESS
    except QoSProvisioningError as e:
        code = exit_code_for(e)
        print(json.dumps({"command": args.command, "error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        logger.debug("Command failed", exc_info=True)
        return code
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return 1

    emit({"command": args.command, "version": get_version(), **record})
    return code


if __name__ == "__main__":
    sys.exit(main())
