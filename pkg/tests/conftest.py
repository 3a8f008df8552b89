import math

import pytest

K = 0.8 * math.pi
ELL = math.pi / K


@pytest.fixture(scope="session")
def k() -> float:
    return K


@pytest.fixture(scope="session")
def ell() -> float:
    return ELL
