import mpmath
import pytest
from hypothesis import HealthCheck, settings

from swcalc import PrecisionContext

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext(50)


@pytest.fixture(scope="session")
def ctx60():
    return PrecisionContext(60)


def close(a, b, tol=mpmath.mpf(10) ** -40):
    b = mpmath.mpmathify(b)
    ref = abs(b) if b != 0 else 1
    return abs(mpmath.mpmathify(a) - b) / ref < tol
