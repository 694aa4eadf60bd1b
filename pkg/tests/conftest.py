import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pgmcoding import CQChannel

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def noiseless():
    return CQChannel.from_states([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


@pytest.fixture
def bsc():
    return CQChannel.from_states([np.diag([0.9, 0.1]), np.diag([0.1, 0.9])])


@pytest.fixture
def flat():
    return CQChannel.from_states([np.eye(2) / 2, np.eye(2) / 2])


@pytest.fixture
def diag_pair():
    return np.diag([0.5, 0.5]), np.diag([0.9, 0.1])
