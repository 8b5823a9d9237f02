import json
from pathlib import Path

import pytest

from lexichron import fixtures

DATA_DIR = Path(__file__).parent / "data"
SURGE_PLAN_PATH = DATA_DIR / "surge_plan.json"
SURGE_SEED = 42


@pytest.fixture(scope="session")
def surge_plan():
    return json.loads(SURGE_PLAN_PATH.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def surge_fixture(surge_plan):
    """(corpus, manifest) for the committed fixture plan."""
    return fixtures.generate(surge_plan, SURGE_SEED)


@pytest.fixture(scope="session")
def fixture_corpus(surge_fixture):
    return surge_fixture[0]


@pytest.fixture(scope="session")
def fixture_manifest(surge_fixture):
    return surge_fixture[1]
