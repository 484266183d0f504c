import numpy as np
import pytest

from entropic_lp import ghn_instance


@pytest.fixture
def ghn():
    return ghn_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
