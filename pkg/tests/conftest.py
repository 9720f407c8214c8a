import numpy as np
import pytest

from steptwo.group import anisotropic_n2r1, anisotropic_n2r2, heisenberg, quaternionic
from steptwo.kernels import KernelConfig


@pytest.fixture(scope="session")
def h1():
    return heisenberg(1)


@pytest.fixture(scope="session")
def aniso21():
    return anisotropic_n2r1()


@pytest.fixture(scope="session")
def aniso22():
    return anisotropic_n2r2()


@pytest.fixture(scope="session")
def quat():
    return quaternionic()


@pytest.fixture(scope="session")
def kcfg():
    return KernelConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(7)
