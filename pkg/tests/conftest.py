import pytest

from legicolor.gf import gf_build
from legicolor.plane import build_pg2

_PLANES = {}


def plane_of_order(q: int):
    if q not in _PLANES:
        from legicolor.gf import factor_prime_power
        p, k = factor_prime_power(q)
        _PLANES[q] = build_pg2(gf_build(p, k))
    return _PLANES[q]


@pytest.fixture
def fano():
    return plane_of_order(2)


@pytest.fixture
def pg3():
    return plane_of_order(3)


@pytest.fixture
def pg9():
    return plane_of_order(9)
