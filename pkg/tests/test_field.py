import random
from fractions import Fraction

import pytest

from algebra.field import FieldSpec, add, div, inv, is_zero, mul, neg, sub
from core.errors import FieldError

from conftest import GF3, GF5, GF7, Q


def test_rational_arithmetic_is_exact():
    assert add(Q("1/2"), Q("1/3")) == Q("5/6")
    assert sub(Q(1), Q("1/3")) == Fraction(2, 3)
    assert inv(Q("-2/3")) == Q("-3/2")


def test_prime_field_arithmetic():
    assert mul(GF7(3), GF7(5)) == 1
    assert div(GF7(1), GF7(3)) == 5
    assert inv(GF5(4)) == 4
    assert neg(GF7(0)) == 0
    assert neg(GF7(3)) == 4


def test_fractions_reduce_modulo_p():
    assert GF7("1/3") == GF7(5)
    assert GF7(Fraction(-1, 2)) == GF7(3)


@pytest.mark.parametrize("text,expected", [("Q", None), ("q", None), ("GF(7)", 7), ("GF(97)", 97)])
def test_parse_field(text, expected):
    assert FieldSpec.parse(text).modulus == expected


@pytest.mark.parametrize("text", ["GF(2)", "GF(9)", "GF(1)", "R", ""])
def test_parse_field_rejects_invalid(text):
    with pytest.raises(FieldError):
        FieldSpec.parse(text)


def test_field_names_round_trip_through_str():
    assert str(Q) == "Q"
    assert str(GF7) == "GF(7)"


def test_division_by_zero_raises():
    with pytest.raises(FieldError):
        inv(GF7(0))
    with pytest.raises(FieldError):
        Q(1) / Q(0)


def test_denominator_divisible_by_p_is_rejected():
    with pytest.raises(FieldError):
        GF7(Fraction(1, 7))


def test_decimal_scalars_are_rejected():
    with pytest.raises(FieldError):
        Q.parse_scalar("0.5")


def test_mixed_fields_do_not_combine():
    with pytest.raises(FieldError):
        GF7(1) + GF5(1)


def test_elements_are_immutable():
    x = GF7(3)
    with pytest.raises(AttributeError):
        x.value = 4


def test_is_zero():
    assert is_zero(GF7(7))
    assert not is_zero(Q("1/9"))


@pytest.mark.parametrize("field", [Q, GF3, GF7])
def test_field_axioms_on_random_triples(field):
    rng = random.Random(2024)

    def draw():
        if field.is_rational:
            return field(Fraction(rng.randint(-20, 20), rng.randint(1, 20)))
        return field(rng.randrange(field.modulus))

    for _ in range(300):
        a, b, c = draw(), draw(), draw()
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        if not a.is_zero():
            assert a * a.inverse() == 1


def test_gf_inverses_exhaustive():
    for x in GF7.elements():
        if not x.is_zero():
            assert x * inv(x) == GF7.one
