"""Tests for the command-line interface."""

import json

import pandas as pd
import pytest

from src.config import ExitCodes, ExportColumns
from src.data.versioning import get_version, manifest_path_for
from src.exceptions import DegenerateOptimumError, InvalidParameterError, NumericalFailureError
from src.main import create_parser, exit_code_for, main
from tests.fixtures.mock_data.mock_data_objects import (
    REFERENCE_C_E,
    REFERENCE_DTMS_AVERAGE,
    REFERENCE_MMPS_AVERAGE,
)


def run_cli(capsys, *argv: str) -> tuple[int, dict, str]:
    """Run main and return (exit code, stdout record, stderr)."""
    code = main(list(argv))
    captured = capsys.readouterr()
    record = json.loads(captured.out) if captured.out.strip() else {}
    return code, record, captured.err


def json_lines(text: str) -> list[dict]:
    """Return the JSON records among the lines of stderr."""
    return [json.loads(line) for line in text.splitlines() if line.startswith("{")]


class TestPointQueries:
    """Test the single-point subcommands."""

    def test_capacity(self, capsys):
        """Test the reference C_E with its chain."""
        code, record, _ = run_cli(capsys, "capacity", "--gamma", "10", "--rate", "3", "--kappa", "50", "--theta", "1")

        assert code == ExitCodes.SUCCESS
        assert record["command"] == "capacity"
        assert record["version"] == get_version()
        assert record["result"]["value"] == pytest.approx(REFERENCE_C_E, abs=1e-4)
        assert record["chain"]["psi"] == pytest.approx(0.7)

    def test_capacity_defaults(self, capsys):
        """Test that the figure defaults apply without flags."""
        code, record, _ = run_cli(capsys, "capacity")
        assert code == ExitCodes.SUCCESS
        assert record["result"]["value"] == pytest.approx(REFERENCE_C_E, abs=1e-4)

    def test_gamma_db(self, capsys):
        """Test that 10 dB is gamma = 10."""
        _, record, _ = run_cli(capsys, "capacity", "--gamma-db", "10")
        assert record["parameters"]["gamma"] == pytest.approx(10.0)
        assert record["parameters"]["gamma_db"] == 10.0

    def test_bandwidth(self, capsys):
        """Test the DTMS bandwidth lies between mean and peak."""
        code, record, _ = run_cli(capsys, "bandwidth", "--source", "dtms", "--p11", "0.5", "--p22", "0.5", "--lambda", "2")
        assert code == ExitCodes.SUCCESS
        assert 1.0 < record["result"]["value"] < 2.0

    def test_match_channel(self, capsys):
        """Test matching a DTMS source to the channel's C_E."""
        code, record, _ = run_cli(capsys, "match", "--source", "dtms", "--p11", "0.5", "--p22", "0.5")
        assert code == ExitCodes.SUCCESS
        assert record["result"]["lambda_avg_star"] == pytest.approx(REFERENCE_DTMS_AVERAGE, abs=1e-4)

    def test_match_given_capacity(self, capsys):
        """Test matching a Poisson source to an explicit C_E."""
        _, record, _ = run_cli(
            capsys, "match", "--source", "mmps", "--alpha", "5", "--beta", "5", "--c-e", str(REFERENCE_C_E)
        )
        assert record["result"]["lambda_avg_star"] == pytest.approx(REFERENCE_MMPS_AVERAGE, abs=1e-4)
        assert record["result"]["method"] == "bisection"

    def test_optimize(self, capsys):
        """Test the optimal rate query."""
        code, record, _ = run_cli(capsys, "optimize", "--gamma", "10", "--kappa", "50", "--theta", "1")
        assert code == ExitCodes.SUCCESS
        assert record["result"]["r_star"] == pytest.approx(2.5, abs=0.05)

    def test_delay_zero_threshold(self, capsys):
        """Test that d = 0 gives probability 1."""
        code, record, _ = run_cli(capsys, "delay", "--d", "0")
        assert code == ExitCodes.SUCCESS
        assert record["result"]["violation"] == 1.0

    def test_delay_with_bandwidth(self, capsys):
        """Test the violation for an explicit a(theta)."""
        _, record, _ = run_cli(capsys, "delay", "--d", "2", "--theta", "0.5", "--bandwidth", "1", "--zeta", "0.5")
        assert record["result"]["violation"] == pytest.approx(0.5 * 2.718281828459045**-1.0)

    def test_delay_target(self, capsys):
        """Test the exponent meeting a violation target."""
        _, record, _ = run_cli(capsys, "delay", "--d", "5", "--epsilon", "0.001")
        assert record["result"]["violation"] == pytest.approx(0.001, rel=1e-5)
        assert record["result"]["theta"] < 1.0

    def test_simulate_with_tails(self, capsys, temp_output_dir):
        """Test a short simulation writing its tails table."""
        out = temp_output_dir / "tails.csv"
        code, record, _ = run_cli(
            capsys, "simulate", "--kappa", "2", "--blocks", "5000", "--warmup", "100",
            "--replicas", "2", "--seed", "3", "--out", str(out),
        )
        assert code == ExitCodes.SUCCESS
        assert record["result"]["stable"] is True
        assert out.exists()
        assert record["output"] == str(out)


class TestErrors:
    """Test exit codes and error records."""

    def test_invalid_parameter(self, capsys):
        """Test that a negative SNR exits with the usage code."""
        code, record, err = run_cli(capsys, "capacity", "--gamma", "-1")
        assert code == ExitCodes.USAGE
        assert record == {}
        assert json_lines(err)[-1]["error"] == "InvalidParameterError"

    def test_bad_flag_value(self, capsys):
        """Test that argparse errors map to the usage code."""
        code, _, _ = run_cli(capsys, "capacity", "--gamma", "abc")
        assert code == ExitCodes.USAGE

    def test_exclusive_snr_flags(self, capsys):
        """Test that --gamma and --gamma-db cannot be combined."""
        code, _, _ = run_cli(capsys, "capacity", "--gamma", "10", "--gamma-db", "10")
        assert code == ExitCodes.USAGE

    def test_no_solution(self, capsys):
        """Test that a source that never emits has no match."""
        code, _, err = run_cli(
            capsys, "match", "--source", "dtms", "--p11", "1", "--p22", "0", "--c-e", "1", "--theta", "1"
        )
        assert code == ExitCodes.NO_SOLUTION
        assert "NoSolutionError" in err

    def test_numerical_failure(self, capsys):
        """Test that an overflowing Poisson tilt exits with the numerical code."""
        code, _, _ = run_cli(capsys, "bandwidth", "--source", "mmps", "--alpha", "5", "--beta", "5", "--theta", "800")
        assert code == ExitCodes.NUMERICAL_FAILURE

    def test_delay_needs_threshold(self, capsys):
        """Test that delay without --d is a usage error."""
        code, _, _ = run_cli(capsys, "delay")
        assert code == ExitCodes.USAGE

    def test_half_dtms_chain(self, capsys):
        """Test that --p11 without --p22 is rejected."""
        code, _, _ = run_cli(capsys, "bandwidth", "--source", "dtms", "--p11", "0.5")
        assert code == ExitCodes.USAGE

    def test_exit_code_for(self):
        """Test the exception to exit code map."""
        assert exit_code_for(InvalidParameterError("bad")) == ExitCodes.USAGE
        assert exit_code_for(DegenerateOptimumError("flat", 0.0, 0.0)) == ExitCodes.NO_SOLUTION
        assert exit_code_for(NumericalFailureError("overflow")) == ExitCodes.NUMERICAL_FAILURE
        assert exit_code_for("InfeasibleTargetError") == ExitCodes.NO_SOLUTION
        assert exit_code_for("NotAnError") == ExitCodes.NUMERICAL_FAILURE


class TestSweepCommand:
    """Test the sweep subcommand."""

    def test_sweep_writes_table(self, capsys, temp_output_dir):
        """Test a small figure sweep with grid overrides."""
        out = temp_output_dir / "fig7.csv"
        code, record, _ = run_cli(
            capsys, "sweep", "--experiment", "fig7_arrival_vs_pon",
            "--grid", "c_e=0.5,1.0", "--grid", "p_on=0.5", "--grid", "families=dtms,mfs",
            "--out", str(out),
        )
        assert code == ExitCodes.SUCCESS
        assert record["result"]["rows"] == 4
        assert out.exists()
        assert manifest_path_for(out).exists()

    def test_empty_custom_grid(self, capsys, temp_output_dir):
        """Test that an empty grid fails before writing anything."""
        out = temp_output_dir / "empty.csv"
        code, _, _ = run_cli(
            capsys, "sweep", "--experiment", "custom",
            "--grid", "gamma=", "--grid", "rate=3", "--grid", "kappa=50", "--grid", "theta=1",
            "--out", str(out),
        )
        assert code == ExitCodes.USAGE
        assert not out.exists()

    def test_failed_points_exit_code(self, capsys, temp_output_dir):
        """Test that failed grid points are reported and set the exit code."""
        out = temp_output_dir / "partial.csv"
        code, record, err = run_cli(
            capsys, "sweep", "--experiment", "custom",
            "--grid", "gamma=10", "--grid", "rate=3", "--grid", "kappa=50", "--grid", "theta=1",
            "--grid", "p_on=0.5,1.5", "--out", str(out),
        )
        assert code == ExitCodes.USAGE
        assert record["result"]["rows"] == 1
        assert json_lines(err)[0]["grid_index"] == 1
        assert out.exists()

    def test_sweep_needs_experiment(self, capsys):
        """Test that sweep without --experiment is a usage error."""
        code, _, _ = run_cli(capsys, "sweep")
        assert code == ExitCodes.USAGE


class TestConfigIntegration:
    """Test config files through the command line."""

    def test_config_file_defaults(self, capsys, temp_output_dir):
        """Test that a config file sets values and flags override them."""
        config = temp_output_dir / "settings.json"
        config.write_text(json.dumps({"gamma": 100.0, "rate": 3.0}))

        _, from_file, _ = run_cli(capsys, "capacity", "--config", str(config))
        _, overridden, _ = run_cli(capsys, "capacity", "--config", str(config), "--gamma", "10")
        assert from_file["parameters"]["gamma"] == 100.0
        assert overridden["parameters"]["gamma"] == 10.0

    def test_environment_config(self, capsys, temp_output_dir, monkeypatch):
        """Test the config file named by the environment variable."""
        config = temp_output_dir / "env.json"
        config.write_text(json.dumps({"kappa": 2.0}))
        monkeypatch.setenv("QOSRATE_CONFIG", str(config))

        _, record, _ = run_cli(capsys, "capacity")
        assert record["parameters"]["kappa"] == 2.0

    def test_unknown_config_key(self, capsys, temp_output_dir):
        """Test that unknown keys in a config file are usage errors."""
        config = temp_output_dir / "bad.json"
        config.write_text(json.dumps({"snr": 10}))
        code, _, _ = run_cli(capsys, "capacity", "--config", str(config))
        assert code == ExitCodes.USAGE

    def test_sweep_settings_from_config(self, capsys, temp_output_dir):
        """Test that sweep grids, the fixed rate and the tradeoff design point come from the file."""
        config = temp_output_dir / "sweep.json"
        config.write_text(
            json.dumps(
                {
                    "experiment": "fig6_delay_tradeoff",
                    "grids": {"gamma": [10.0], "theta": [1.0], "p_on": [0.5]},
                    "families": ["mfs"],
                    "delays": [2.0],
                    "fixed_rate": 3.0,
                    "design_theta": 0.5,
                    "arrival_rate": 0.5,
                }
            )
        )
        out = temp_output_dir / "fig6.csv"
        code, record, _ = run_cli(
            capsys, "sweep", "--config", str(config), "--arrival-rate", "0.25", "--out", str(out)
        )

        parameters = record["parameters"]
        assert code == ExitCodes.SUCCESS
        assert record["result"]["rows"] == 3
        assert parameters["experiment"] == "fig6_delay_tradeoff"
        assert parameters["grids"]["families"] == ["mfs"]
        assert parameters["grids"]["delays"] == [2.0]
        assert parameters["fixed_rate"] == 3.0
        assert parameters["params"]["design_theta"] == 0.5
        assert parameters["params"]["arrival_rate"] == 0.25

        frame = pd.read_csv(out)
        p_on_rows = frame[frame[ExportColumns.PANEL] == "p_on"]
        assert (p_on_rows[ExportColumns.LAMBDA_AVG_STAR] == 0.25).all()


class TestParser:
    """Test the argument parser."""

    def test_subcommands(self):
        """Test that every command parses."""
        parser = create_parser()
        for command in ("capacity", "bandwidth", "match", "optimize", "delay", "simulate", "sweep"):
            assert parser.parse_args([command]).command == command

    def test_grid_syntax(self):
        """Test NAME=V1,V2 parsing."""
        args = create_parser().parse_args(["sweep", "--grid", "theta=0.1,1", "--grid", "families=mmps"])
        assert args.grid == [("theta", [0.1, 1.0]), ("families", ["mmps"])]
