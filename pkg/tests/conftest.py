import numpy as np
import pytest

from ergotropy.qcore import DensityMatrix, Hamiltonian, PureState


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def example1():
    h = Hamiltonian([-1.0, 0.0, 1.0])
    rho = DensityMatrix.from_diagonal([0.15, 0.7, 0.15])
    sigma = DensityMatrix.from_diagonal([0.49, 0.02, 0.49])
    return rho, sigma, h


@pytest.fixture
def example2():
    h = Hamiltonian([0.0, 1.0, 2.0, 3.0])
    rho = DensityMatrix.from_diagonal([0.275, 0.55, 0.125, 0.05])
    sigma = DensityMatrix.from_diagonal([0.35, 0.35, 0.3, 0.0])
    return rho, sigma, h


@pytest.fixture
def bell():
    return PureState(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))


def random_hamiltonian(rng, d, basis=True):
    from ergotropy.qcore import random_unitary

    e = rng.uniform(-2.0, 2.0, d)
    return Hamiltonian(e, random_unitary(d, rng) if basis else None)
