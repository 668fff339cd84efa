import numpy as np
import pytest

from spinsqueeze import SpinSystem, angular_momentum


@pytest.fixture(scope="session")
def spin72():
    return SpinSystem(7)


@pytest.fixture(scope="session")
def ops72(spin72):
    return angular_momentum(spin72)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))
