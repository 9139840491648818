import numpy as np
import pytest

from juliathermo.models import circle_model, middle_thirds_cantor, quadratic_full_shift
from juliathermo.thermo import conformal_potential, max_entropy_potential


@pytest.fixture(scope="session")
def z5():
    return quadratic_full_shift(5.0)


@pytest.fixture(scope="session")
def circle():
    return circle_model()


@pytest.fixture(scope="session")
def cantor():
    return middle_thirds_cantor()


@pytest.fixture(scope="session")
def z5_maxent(z5):
    return max_entropy_potential(z5, 10)


@pytest.fixture(scope="session")
def z5_conformal(z5):
    return conformal_potential(z5, 10)


@pytest.fixture(scope="session")
def circle_maxent(circle):
    return max_entropy_potential(circle, 10)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
