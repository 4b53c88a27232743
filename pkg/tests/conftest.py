import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "formkit",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("formkit")


@pytest.fixture
def rng(request):
    # one reproducible stream per test
    seed = sum(map(ord, request.node.name)) % (2**32)
    return np.random.default_rng(seed)
