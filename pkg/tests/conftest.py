import numpy as np
import pytest
from hypothesis import settings

# reproducible property tests: same examples on every run
settings.register_profile("repro", derandomize=True)
settings.load_profile("repro")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
