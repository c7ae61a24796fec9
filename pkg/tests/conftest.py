# tests/conftest.py
import os, sys
from pathlib import Path

import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from core.config import Config, ScenarioConfig  # noqa: E402

FIXTURES = Path(ROOT) / "data" / "fixtures"
SCENARIOS = Path(ROOT) / "data" / "scenarios"


@pytest.fixture(scope="session")
def config():
    return Config()


@pytest.fixture(scope="session")
def scenario_config():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def scenario(scenario_config):
    return scenario_config.to_scenario()


@pytest.fixture(scope="session")
def geom(scenario):
    return scenario.geom


@pytest.fixture(scope="session")
def params(scenario):
    return scenario.params


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def scenarios_dir():
    return SCENARIOS
