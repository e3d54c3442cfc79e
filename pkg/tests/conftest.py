import numpy as np
import pytest

from leibenson import BarenblattProfile, RadialGrid, build_euclidean
from leibenson.geometry import power_density


@pytest.fixture(scope="session")
def default_profile():
    return BarenblattProfile(3, 2, 0.5, 1.5, C=1.0, T=1.0)


@pytest.fixture(scope="session")
def weighted_r3():
    """Euclidean n=3 model with the r^-1.5 density of the default profile."""
    return build_euclidean(3, 2).with_density(power_density(1.5))


@pytest.fixture(scope="session")
def grid64(weighted_r3):
    return RadialGrid.build(weighted_r3, 8.0, 64)
