import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from grstar.scalars import ContextMismatch, FieldScalar, field, fs_add, fs_inv, fs_mul, fs_to_float

small = st.fractions(min_value=-20, max_value=20, max_denominator=12)
quad = st.tuples(small, small, small, small)
nonsquare = st.sampled_from([2, 3, 5, 6, 7, Fraction(5, 2), Fraction(7, 3)])


def fs(d, c):
    return field(d)(*c)


def test_basic_arithmetic():
    F = field(2)
    assert fs_add(F(1), F(0, 1)).coeffs == (1, 1, 0, 0)
    assert fs_add(F(Fraction(1, 2)), F(Fraction(1, 2))) == F(1)
    x = F(3, 1, 2, 5)
    assert x + F.zero == x


@pytest.mark.parametrize("delta", [2, 3, Fraction(5, 2)])
def test_defining_relations(delta):
    F = field(delta)
    d = Fraction(delta)
    assert fs_mul(F.sqrt_delta(), F.sqrt_delta()) == d
    assert fs_mul(F.sqrt_d2m1(), F.sqrt_d2m1()) == d * d - 1
    assert fs_mul(F.sqrt_delta(), F.sqrt_d2m1()).coeffs == (0, 0, 0, 1)
    assert F.sqrt_delta_minus_inv() ** 2 == d - 1 / d
    assert F.sqrt_one_minus_inv_sq() ** 2 == 1 - 1 / d ** 2
    assert F.sqrt_delta_minus_inv() / F.sqrt_delta() == F.sqrt_one_minus_inv_sq()


@pytest.mark.parametrize("k", range(-5, 6))
def test_delta_half_powers(k):
    F = field(3)
    assert F.delta_power_half(k) ** 2 == Fraction(3) ** k


def test_inverse_examples():
    F = field(2)
    assert fs_inv(F.sqrt_delta()).coeffs == (0, Fraction(1, 2), 0, 0)
    assert fs_inv(F.one) == 1
    assert fs_inv(F.sqrt_d2m1()).coeffs == (0, 0, Fraction(1, 3), 0)
    with pytest.raises(ZeroDivisionError):
        fs_inv(F.zero)


def test_float_examples():
    assert fs_to_float(field(2)(1)) == 1.0
    assert fs_to_float(field(4)(0, 1)) == 2.0
    assert fs_to_float(field(2)(0, 0, 1)) == pytest.approx(math.sqrt(3), rel=1e-15)


def test_context_mismatch():
    with pytest.raises(ContextMismatch):
        field(2)(0, 1) + field(3)(0, 1)


@pytest.mark.parametrize("delta", [4, Fraction(5, 4), 9])
def test_degenerate_fields_fold(delta):
    # delta=4: sqrt(delta) rational; 5/4: delta^2-1 = 9/16 square; 9: sqrt(delta) rational
    F = field(delta)
    assert F.degenerate
    x = F(1, 1, 1, 1)
    assert x.coeffs == F(*x.coeffs).coeffs
    assert float(F.sqrt_delta()) == pytest.approx(math.sqrt(float(delta)))
    assert x * x.inverse() == 1


@given(quad, quad, quad, nonsquare)
def test_ring_axioms(a, b, c, d):
    x, y, z = fs(d, a), fs(d, b), fs(d, c)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x + y == y + x
    assert (x + y) + z == x + (y + z)


@given(quad, st.sampled_from([2, 3, 5, 6, 7, 10, 11]))
def test_inverse_property(a, d):
    x = fs(d, a)
    if not x:
        return
    assert fs_mul(x, fs_inv(x)) == 1


@given(quad, quad, nonsquare)
def test_float_homomorphism(a, b, d):
    x, y = fs(d, a), fs(d, b)
    for exact, approx in ((x * y, float(x) * float(y)), (x + y, float(x) + float(y))):
        scale = max(1.0, abs(float(x)) * abs(float(y)), abs(float(x)) + abs(float(y)))
        assert abs(float(exact) - approx) <= 1e-12 * scale


@given(quad, nonsquare)
def test_sign_matches_float(a, d):
    x = fs(d, a)
    s = x.sign()
    f = float(x)
    assert (f > 0) - (f < 0) == s


def test_sign_near_cancellation():
    F = field(2)
    # 1393/985 sits 3.6e-7 below sqrt(2)
    x = F(Fraction(1393, 985), -1)
    assert x.sign() == -1
    assert F(Fraction(-1393, 985), 1) > 0
    # sqrt(2) - 665857/470832 is about -1.6e-12
    tiny = F(0, 1) - F(Fraction(665857, 470832)) + F(Fraction(1, 10 ** 30))
    assert tiny.sign() == -1
    assert float(tiny) < 0


@given(quad, nonsquare)
def test_json_round_trip(a, d):
    F = field(d)
    x = F(*a)
    obj = json.loads(json.dumps(x.to_json()))
    assert set(obj) == {"q", "sqrt_delta", "sqrt_d2m1", "sqrt_prod"}
    assert F.from_json(obj) == x


def test_rejects_small_delta():
    with pytest.raises(ValueError):
        field(1)
    with pytest.raises(ValueError):
        field(Fraction(1, 2))
