import numpy as np
import pytest

from hardedge import acceptance


@pytest.fixture(scope="session")
def hm():
    return acceptance.hm_table()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
