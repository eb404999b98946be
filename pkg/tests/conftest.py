import numpy as np
import pytest

from s3kepler.geometry import SystemParams


@pytest.fixture
def unit_params():
    return SystemParams(m=1.0, lam=1.0, alpha=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
