import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)


@pytest.fixture
def small_pair(rng):
    """A small random image/flow pair for warp-level checks."""
    img = rng.random((12, 10, 3))
    flow = rng.uniform(-3.0, 3.0, size=(12, 10, 2))
    return img, flow
