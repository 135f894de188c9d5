import numpy as np
import pytest

from invrec.lattice import LatticeBasis, default_basis
from invrec.potential import random_generic

TWO_PI = 2 * np.pi


@pytest.fixture
def basis():
    return default_basis()


@pytest.fixture
def skew_basis():
    return LatticeBasis(TWO_PI * np.array([[1, 0, 0], [1, 1, 0], [1, 1, 1]], dtype=float))


@pytest.fixture
def q(basis):
    return random_generic(basis, np.random.default_rng(1234))


def random_admissible(rng):
    """Basis near the default fixture, perturbed enough to break its symmetries."""
    from invrec.lattice import check_admissible

    base = TWO_PI * np.array([[1, 0, 0], [1, 1, 0], [1, 1, 2]], dtype=float)
    while True:
        b = LatticeBasis(base + rng.uniform(-1.0, 1.0, size=(3, 3)))
        if check_admissible(b).admissible:
            return b
