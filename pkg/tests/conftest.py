import numpy as np
import pytest


def rand_complex(rng, *shape):
    """Standard complex Gaussian draws, independent real and imaginary parts."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
