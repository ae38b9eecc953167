import os

import pytest
from hypothesis import HealthCheck, settings

from coweak.system import parse_system

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

INTRO = """\
semiring real
tau tau
trans x a 1/2 y
trans x tau 1/2 x
"""

TRIANGLE = """\
semiring nat
tau tau
trans x tau 2 y
trans x tau 2 z
trans y tau 2 z
"""


@pytest.fixture
def intro():
    return parse_system(INTRO)


@pytest.fixture
def triangle():
    return parse_system(TRIANGLE)
