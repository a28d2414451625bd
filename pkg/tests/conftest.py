from fractions import Fraction
from itertools import combinations
from math import prod

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def esym_enum(xs, k):
    """Elementary symmetric polynomial by explicit subset enumeration."""
    return sum(prod(c) for c in combinations(xs, k))


@pytest.fixture
def golden_L():
    return (3, 2, 1)


F = Fraction
