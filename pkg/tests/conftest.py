import numpy as np
import pytest

from bdloss.sylvester import SylvesterSystem


def random_simplex(rng, n, c):
    return rng.dirichlet(np.ones(c), size=n)


def random_system(rng, d, c, n=None):
    """A Sylvester system shaped like a BD-LDL training problem."""
    n = n or max(d, c) + 10
    X = rng.standard_normal((n, d)) / np.sqrt(n)
    D = random_simplex(rng, n, c)
    lam1 = 10 ** rng.uniform(-3, 1)
    lam2 = 10 ** rng.uniform(-3, 0)
    A = X.T @ X + lam2 * np.eye(d)
    B = lam1 * D.T @ D
    return SylvesterSystem(0.5 * (A + A.T), 0.5 * (B + B.T), (1 + lam1) * X.T @ D)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
