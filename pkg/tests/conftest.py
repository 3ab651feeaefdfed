import random

import pytest
from gmpy2 import mpq
from hypothesis import HealthCheck, settings

from nilnf import Poly, build_triple

settings.register_profile(
    "nilnf",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("nilnf")

_TRIPLES = {}


def triple_for(blocks):
    key = tuple(blocks)
    if key not in _TRIPLES:
        _TRIPLES[key] = build_triple(key)
    return _TRIPLES[key]


@pytest.fixture
def t3():
    return triple_for((3,))


@pytest.fixture
def t2():
    return triple_for((2,))


@pytest.fixture
def rng():
    return random.Random(20240611)


def h_poly():
    """``h = xz - y^2/2`` in three variables."""
    return Poly(3, {(1, 0, 1): 1, (0, 2, 0): mpq(-1, 2)})
