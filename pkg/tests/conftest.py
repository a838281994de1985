import numpy as np
import pytest

from tendonarm import ArmParameters


@pytest.fixture
def params():
    """Reference arm: 222 mm backbone, 12 mm pitch circle."""
    return ArmParameters()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_configurations(rng, n, theta_lo=0.05, theta_hi=3.0):
    """(theta, delta) arrays drawn uniformly from the bending range."""
    return (rng.uniform(theta_lo, theta_hi, n),
            rng.uniform(-np.pi, np.pi, n))
