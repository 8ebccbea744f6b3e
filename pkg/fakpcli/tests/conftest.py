import os

import pytest


def _slow_enabled(config) -> bool:
    # the options are registered by the library conftest when both test
    # trees are collected together
    if (config.getoption("--runslow", default=False)
            or config.getoption("--integration", default=False)):
        return True
    return any(os.getenv(var, default="false").lower() == "true"
               for var in ("FAKP_SLOW_TESTS", "FAKP_INTEGRATION_TESTS"))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: mark test as slow")


def pytest_collection_modifyitems(config, items):
    if _slow_enabled(config):
        return
    skip_slow = pytest.mark.skip(
        reason="need --runslow or FAKP_SLOW_TESTS=true to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# a one-sample-per-class experiment with a two-block model
SMALL_EXPERIMENT = {
    "points_per_cloud": "16",
    "train_count": "1",
    "test_count": "1",
    "train_sizes": "6",
    "channels": "3,6",
    "radii": "0.8,1.6",
    "subsample_cells": "0.4,0.8",
    "embedding_width": "6",
    "K": "3",
    "epochs": "1",
    "batch_size": "6",
}


@pytest.fixture
def small_overrides():
    """``--set`` arguments of :data:`SMALL_EXPERIMENT`."""
    args = []
    for key, value in SMALL_EXPERIMENT.items():
        args += ["--set", f"{key}={value}"]
    return args
