import numpy as np
import pytest
from hypothesis import settings

# numerical property tests run whole FFTs; the default deadline is too twitchy
settings.register_profile("numeric", deadline=None, max_examples=50)
settings.load_profile("numeric")

SEED = 20260819


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)
