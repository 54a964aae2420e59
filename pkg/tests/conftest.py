import numpy as np
import pytest

from padic_spherical.field import construct_field


@pytest.fixture(scope='session')
def ctx32():
    """Q_9 = Q_3[t]/(t^2 + 1) at precision 8."""
    return construct_field(3, 2, 8)


@pytest.fixture(scope='session')
def ctx52():
    return construct_field(5, 2, 8)


@pytest.fixture(scope='session')
def ctx53():
    return construct_field(5, 3, 6)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def rng_factory():
    def make(*keys):
        return np.random.default_rng(list(keys))
    return make
