import pytest
from hypothesis import HealthCheck, settings

from reciprocal_traces import PrecisionContext

settings.register_profile("artifact", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("artifact")


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext(60)


@pytest.fixture(scope="session")
def ctx40():
    return PrecisionContext(40)
