import pytest
from hypothesis import HealthCheck, settings

from twistpoints.arith import squarefree_sieve
from twistpoints.curve import TwistCurve
from twistpoints.search import SearchConfig, enumerate_all

settings.register_profile("default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def points_upto_500():
    """D -> sorted integral points (y > 0) for squarefree D <= 500, default horizons."""
    return {D: enumerate_all(TwistCurve(D), SearchConfig()).points for D in squarefree_sieve(500).values.tolist()}
