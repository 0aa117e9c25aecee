"""Test configuration for pytest for condrenyi tests."""

import pathlib

import numpy as np
import pytest
from click.testing import CliRunner

from condrenyi.fileio import dump
from condrenyi.objects import SeededRng, bell_state, random_density

SEED = 20240601


@pytest.fixture(autouse=True)
def app_dir(tmp_path_factory, monkeypatch) -> pathlib.Path:
    """Point click's application directory at a temporary directory for every test"""
    home = tmp_path_factory.mktemp("home")
    monkeypatch.setenv("HOME", str(home))
    monkeypatch.setenv("XDG_CONFIG_HOME", str(home / ".config"))
    return home


@pytest.fixture
def rng() -> np.random.Generator:
    """Return a seeded generator"""
    return SeededRng(SEED).generator()


@pytest.fixture
def bell():
    """Return the Bell state as a density operator on A, B"""
    return bell_state().density()


@pytest.fixture
def mixed_pair(rng):
    """Return a full-rank and a rank-deficient two-qubit state"""
    return random_density((2, 2), None, rng), random_density((2, 2), 2, rng)


@pytest.fixture
def runner() -> CliRunner:
    """Return a click CliRunner"""
    return CliRunner()


@pytest.fixture
def bell_file(tmp_path) -> pathlib.Path:
    """Return path to a Bell state file"""
    path = tmp_path / "bell.json"
    dump(bell_state(), path)
    return path


@pytest.fixture
def config_file(tmp_path) -> pathlib.Path:
    """Return path to a config file that does not exist yet"""
    return tmp_path / "condrenyi.plist"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long running verification runs")
