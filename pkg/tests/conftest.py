import matplotlib

matplotlib.use("Agg")

import numpy as np
import pytest


@pytest.fixture
def tol():
    return 1e-10


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_density(n, rng, floor=0.05):
    """Full-rank density matrix with eigenvalues bounded below"""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = z @ z.conj().T
    rho = rho / np.trace(rho).real
    rho = (1 - floor) * rho + floor * np.eye(n) / n
    return (rho + rho.conj().T) / 2


@pytest.fixture
def density_factory(rng):
    return lambda n: random_density(n, rng)
