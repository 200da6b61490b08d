import pytest

from poisson_nlie.finite_algebra import fixture_hypo, fixture_torus
from poisson_nlie.ring import euler_family


@pytest.fixture(scope="session")
def hypo():
    return fixture_hypo(4, 6)


@pytest.fixture(scope="session")
def torus():
    return fixture_torus(4, 5)


@pytest.fixture(scope="session")
def euler3():
    return euler_family(3)


@pytest.fixture(scope="session")
def euler5():
    return euler_family(5)
