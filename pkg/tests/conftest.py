import numpy as np
import pytest

from enflotype import kernels


@pytest.fixture
def restore_backend():
    """Snapshot the active kernel backend and restore it afterwards."""
    before = kernels.get_backend()
    yield
    kernels.set_backend(before)


@pytest.fixture
def rng():
    return np.random.default_rng(20240813)
