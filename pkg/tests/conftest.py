from pathlib import Path

import pytest

from echoroom.scenario import load_scenario
from echoroom.scene import Config

REPO = Path(__file__).resolve().parent.parent
SCENARIO_DIR = REPO / "scenarios"


@pytest.fixture(scope="session")
def study_path() -> str:
    return str(SCENARIO_DIR / "study_room.json")


@pytest.fixture()
def study_scenario(study_path):
    # Loaded fresh per test; sessions deep-copy the world anyway.
    return load_scenario(study_path)


@pytest.fixture()
def config() -> Config:
    return Config()
