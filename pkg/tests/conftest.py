import numpy as np
import pytest

from herglotz.certification import default_grid


@pytest.fixture(scope="session")
def grid():
    """The 400-point standard grid as flat ``(z1, z2)`` arrays."""
    return default_grid()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
