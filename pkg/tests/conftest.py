import os

import numpy as np
import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("HMT_LONG"):
        return
    skip = pytest.mark.skip(reason="paper-scale profile; set HMT_LONG=1 to run")
    for item in items:
        if "long_profile" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
