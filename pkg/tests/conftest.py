import pytest
from hypothesis import HealthCheck, settings

from mertens.constants import default_table
from mertens.primes import get_store

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

PREC = 192


@pytest.fixture(scope="session")
def table():
    return default_table(PREC)


@pytest.fixture(scope="session")
def store7():
    return get_store(10**7, PREC, use_cache=False)


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False,
                     help="run checks that sieve to 10^9 (minutes, about 1.5 GB)")
