import pytest
from hypothesis import HealthCheck, settings

from jetsym.jet import JetSpace

settings.register_profile(
    "ci", max_examples=25, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large,
                           HealthCheck.filter_too_much])
settings.load_profile("ci")


@pytest.fixture
def ode1():
    return JetSpace(["x"], ["u"], 2)


@pytest.fixture
def ode1_3():
    return JetSpace(["x"], ["u"], 3)


@pytest.fixture
def ode2():
    return JetSpace(["x"], ["u", "v"], 2, params=["k1", "k2"])


@pytest.fixture
def pde1():
    return JetSpace(["x", "y"], ["u"], 2, params=["k1", "k2", "k3", "k4"])
