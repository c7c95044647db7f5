import pytest
from hypothesis import HealthCheck, settings

from dsicheck.catalog import reference_model

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

@pytest.fixture
def pt():
    return reference_model("PT")


@pytest.fixture
def ext1():
    return reference_model("DRHO_EXT1")
