"""Pytest configuration and shared fixtures."""

import tempfile
from pathlib import Path

import pytest
from click.testing import CliRunner

from thc_transitions.config import LC_PRESETS
from thc_transitions.params import Params


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test outputs."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def r_lc1():
    """Aspect ratio selecting l_c = 1."""
    return LC_PRESETS[1]


@pytest.fixture
def r_lc2():
    """Aspect ratio selecting l_c = 2."""
    return LC_PRESETS[2]


@pytest.fixture
def type_i_params(r_lc1):
    """Critical-line parameters with a continuous transition (q_1 > 0)."""
    return Params.at_criticality(620.0, 0.1, 7.5, r_lc1)


@pytest.fixture
def type_ii_params(r_lc1):
    """Critical-line parameters with a drastic transition (q_1 < 0)."""
    return Params.at_criticality(700.0, 0.1, 7.5, r_lc1)


@pytest.fixture
def oscillatory_params(r_lc1):
    """Parameters with K < 0 (R above R0 for Le < 1)."""
    return Params.at_criticality(800.0, 0.1, 7.5, r_lc1)


@pytest.fixture
def cli_runner():
    """Click test runner with stderr kept apart from stdout."""
    return CliRunner()


# Pytest configuration
def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "slow: long-running reproduction or sweep"
    )
