"""
Shared fixtures and the slow-test switch.

Tests marked slow (full corpus on the game backend, large law populations)
only run with --runslow.
"""
import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT))

from src.game_core import Bounds, set_audit  # noqa: E402

# nested composites recurse once per layer of the denotation
sys.setrecursionlimit(max(sys.getrecursionlimit(), 100000))


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow acceptance tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long acceptance runs, enabled with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_bounds():
    return Bounds(max_nat=2, max_index=2, max_len=6, max_steps=20000)


@pytest.fixture
def audit():
    set_audit(True)
    yield
    set_audit(False)


@pytest.fixture
def corpus_dir():
    return ROOT / "corpus"


@pytest.fixture
def programs_dir():
    return ROOT / "programs"
