from fractions import Fraction

import numpy as np
import pytest

from stalab import PhysicalParams


@pytest.fixture
def params():
    return PhysicalParams.rubidium87(n=1)


@pytest.fixture
def params_n2():
    return PhysicalParams.rubidium87(n=2)


@pytest.fixture
def T():
    return Fraction(1, 10)


@pytest.fixture
def g_down(params):
    """9.8 m/s^2 along the beam axis."""
    return tuple(9.8 * params.k_hat)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
