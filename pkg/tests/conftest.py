import numpy as np
import pytest

from conformal.catalog import make_helcat, make_torus, make_tube


@pytest.fixture(scope="session")
def helcat_quarter():
    return make_helcat(np.pi/4)


@pytest.fixture(scope="session")
def helicoid():
    return make_helcat(0.0)


@pytest.fixture(scope="session")
def catenoid():
    return make_helcat(np.pi/2)


@pytest.fixture(scope="session")
def torus():
    return make_torus(2.0, 1.0)


@pytest.fixture(scope="session")
def helical_tube():
    return make_tube(("helix", 2.0, 0.5), 0.35)
