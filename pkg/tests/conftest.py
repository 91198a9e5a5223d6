import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def heisenberg():
    from contactconn.registry import builtin_registry

    return next(m for m in builtin_registry() if m.name == "heisenberg").build()


@pytest.fixture
def perturbed():
    from contactconn.registry import builtin_registry

    return next(
        m for m in builtin_registry() if m.name == "heisenberg-perturbed"
    ).build()
