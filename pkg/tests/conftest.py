import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lqgame import make_preset, solve_nash

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def g1():
    return make_preset("g1").spec


@pytest.fixture(scope="session")
def g1_nash(g1):
    return solve_nash(g1)


@pytest.fixture(scope="session")
def mazumdar():
    return make_preset("mazumdar", sigma2=1.0).spec


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
