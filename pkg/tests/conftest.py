import os

# results go to stdout, logs to stderr only; no log files from test runs
os.environ.setdefault("SIMCACHE_LOG_DIR", "")
os.environ.setdefault("SIMCACHE_LOG_LEVEL", "WARNING")

import pytest

from simcache.config.settings import SimConfig
from simcache.utils.config_loader import with_overrides


@pytest.fixture
def small_cfg() -> SimConfig:
    """Default hierarchy on a short workload, mean latencies."""
    return with_overrides(SimConfig(), [("count", 400), ("deterministic", True), ("seeds", 3)])


@pytest.fixture
def make_cfg():
    def _make(**overrides) -> SimConfig:
        return with_overrides(SimConfig(), list(overrides.items()))

    return _make
