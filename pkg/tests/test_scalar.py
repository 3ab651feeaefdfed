import json
import math
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from nilnf.scalar import EXACT, ONE, ZERO, RadScalar, float_mode, reduce_radical, sqrt_rational
from nilnf.serialize import scalar_from_json, scalar_to_json

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def q236(draw):
    """Random element of Q(sqrt2, sqrt3, sqrt6)."""
    return RadScalar.from_terms({d: mpq(draw(rationals)) for d in (1, 2, 3, 6)})


@st.composite
def nonzero_q236(draw):
    x = draw(q236())
    if not x:
        x = ONE
    return x


def _trial_reduce(n):
    k = 1
    d = n
    p = 2
    while p * p <= d:
        while d % (p * p) == 0:
            d //= p * p
            k *= p
        p += 1
    return d, k


@pytest.mark.parametrize("n,expected", [(8, (2, 2)), (1, (1, 1)), (12, (3, 2)), (18, (2, 3)), (49, (1, 7))])
def test_reduce_radical_examples(n, expected):
    assert reduce_radical(n) == expected


@given(st.integers(min_value=1, max_value=10**6))
def test_reduce_radical_matches_trial_division(n):
    d, k = reduce_radical(n)
    assert k * k * d == n
    assert (d, k) == _trial_reduce(n)


@given(st.integers(min_value=1, max_value=500), st.integers(min_value=1, max_value=500))
def test_product_of_roots_normalizes(a, b):
    prod = sqrt_rational(a) * sqrt_rational(b)
    d, k = reduce_radical(a * b)
    assert prod == RadScalar.from_terms({d: k})


def test_invert_examples():
    s2 = sqrt_rational(2)
    assert s2.invert() == s2 / 2
    assert ONE.invert() == ONE
    assert (1 + s2).invert() == s2 - 1


def test_invert_zero_raises():
    with pytest.raises(ZeroDivisionError):
        ZERO.invert()
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


@given(q236(), q236(), q236())
def test_field_associativity(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)


@given(q236(), q236(), q236())
def test_field_distributivity(x, y, z):
    assert x * (y + z) == x * y + x * z


@given(q236(), q236())
def test_field_commutativity(x, y):
    assert x + y == y + x
    assert x * y == y * x


@given(nonzero_q236())
def test_inverse(x):
    assert x * x.invert() == ONE
    assert x / x == ONE


@given(q236())
def test_float_conversion_consistent(x):
    expect = sum(float(q) * math.sqrt(d) for d, q in x.terms.items())
    assert math.isclose(float(x), expect, rel_tol=1e-12, abs_tol=1e-12)


@given(q236(), q236())
def test_exact_order_agrees_with_float(x, y):
    if abs(float(x) - float(y)) > 1e-9:
        assert (x < y) == (float(x) < float(y))


def test_sign_of_tiny_difference():
    # 99/70 approximates sqrt(2) from above to 1e-4
    assert sqrt_rational(2) < RadScalar.coerce(Fraction(99, 70))
    assert sqrt_rational(2) > RadScalar.coerce(Fraction(140, 99))


def test_float_interop():
    s2 = sqrt_rational(2)
    assert isinstance(s2 * 1.5, float)
    assert math.isclose(s2 + 0.5, math.sqrt(2) + 0.5)


@given(q236())
def test_json_round_trip(x):
    obj = scalar_to_json(x)
    assert scalar_from_json(json.loads(json.dumps(obj))) == x
    for t in obj["terms"]:
        assert isinstance(t["num"], str) and isinstance(t["den"], str)


def test_json_rejects_garbage():
    with pytest.raises(ValueError):
        RadScalar.from_json({"terms": [{"rad": 2}]})


def test_modes():
    fm = float_mode(1e-6)
    assert fm.is_zero(1e-7) and not fm.is_zero(1e-5)
    assert EXACT.is_zero(ZERO) and not EXACT.is_zero(sqrt_rational(2))
    with pytest.raises(ValueError):
        float_mode(0)
