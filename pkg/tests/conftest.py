"""Pytest configuration and fixtures for QoS provisioning tests."""

import shutil
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from scipy import linalg

from src.channel.markov_channel import derive_chain, generator_matrix
from src.data.models import ChannelSpec
from src.utils.config_loader import CONFIG_ENV_VAR
from tests.fixtures.mock_data.mock_data_objects import ModelFactory


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch):
    """Keep a developer's QOSRATE_CONFIG out of the tests."""
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)


@pytest.fixture
def temp_output_dir():
    """Create temporary directory for test outputs."""
    temp_dir = tempfile.mkdtemp()
    yield Path(temp_dir)
    shutil.rmtree(temp_dir)


@pytest.fixture
def reference_channel():
    """Channel at the figure defaults gamma=10, R=3, kappa=50."""
    return ModelFactory.create_channel()


@pytest.fixture
def memory_channel():
    """Channel with noticeable block-to-block memory (kappa T = 2)."""
    return ModelFactory.create_channel(kappa=2.0)


@pytest.fixture
def dtms_source():
    """Symmetric DTMS source, P_ON = 0.5."""
    return ModelFactory.create_dtms()


@pytest.fixture
def mfs_source():
    """Fluid source with P_ON = 0.5 and alpha + beta = 10."""
    return ModelFactory.create_mfs()


@pytest.fixture
def mmps_source():
    """Poisson source with P_ON = 0.5 and alpha + beta = 10."""
    return ModelFactory.create_mmps()


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(12345)


class ExactMoments:
    """Finite-horizon tilted moments of two-state chains, used as oracles."""

    @staticmethod
    def continuous_log_mgf(rate_off_on: float, rate_on_off: float, tilt: float, horizon: float) -> float:
        """Return log E[exp(tilt * ON time in [0, horizon])] from the stationary start."""
        q = np.array([[-rate_off_on, rate_off_on], [rate_on_off, -rate_on_off]])
        total = rate_off_on + rate_on_off
        start = np.array([rate_on_off / total, rate_off_on / total])
        propagated = linalg.expm((q + np.diag([0.0, tilt])) * horizon) @ np.ones(2)
        return float(np.log(start @ propagated))

    @staticmethod
    def channel_log_mgf(channel: ChannelSpec, theta: float, horizon: float) -> float:
        """Return log E[exp(-theta S(t))] of the continuous service R * (ON time)."""
        chain = derive_chain(channel)
        q = generator_matrix(chain)
        start = np.array([chain.p_off, chain.p_on])
        tilted = q - np.diag([0.0, theta * channel.rate])
        return float(np.log(start @ linalg.expm(tilted * horizon) @ np.ones(2)))

    @staticmethod
    def dtms_log_mgf(p11: float, p22: float, tilt: float, steps: int) -> float:
        """Return log E[exp(tilt * N_on)] over the first ``steps`` steps."""
        if steps == 0:
            return 0.0
        p = np.array([[p11, 1.0 - p11], [1.0 - p22, p22]])
        d = np.diag([1.0, np.exp(tilt)])
        p_on = (1.0 - p11) / (2.0 - p11 - p22)
        start = np.array([1.0 - p_on, p_on])
        return float(np.log(start @ d @ np.linalg.matrix_power(p @ d, steps - 1) @ np.ones(2)))

    @staticmethod
    def growth(log_mgf, theta: float, blocks: int) -> float:
        """Return [L(t) - L(t // 2)] / (theta (t - t // 2)) for a log-MGF ``L`` of the horizon."""
        early = blocks // 2
        return (log_mgf(blocks) - log_mgf(early)) / (theta * (blocks - early))


@pytest.fixture
def exact_moments():
    """Matrix-exponential oracles for the Monte Carlo estimators."""
    return ExactMoments


class TableValidator:
    """Utility class for validating exported tables."""

    @staticmethod
    def validate_csv_structure(csv_path: Path, expected_columns: list) -> bool:
        """Validate CSV has expected structure."""
        df = pd.read_csv(csv_path)
        return list(df.columns) == expected_columns

    @staticmethod
    def validate_reproducibility(file1: Path, file2: Path) -> bool:
        """Check if two files are byte-identical."""
        return file1.read_bytes() == file2.read_bytes()


@pytest.fixture
def table_validator():
    """Provide the table validator."""
    return TableValidator
