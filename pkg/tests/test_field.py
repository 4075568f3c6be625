import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from tensorlab import FieldSpec, Scalar, field_cardinality, field_ops, sample_scalar
from tensorlab.errors import (
    DivisionByZeroError,
    MixedFieldsError,
    ParseError,
    ValidationError,
)
from tensorlab.field import is_prime

SPECS = [FieldSpec.rational(), FieldSpec.prime(2), FieldSpec.prime(7), FieldSpec.prime(101),
         FieldSpec.prime(2**31 - 1)]


def _random_scalar(spec, rng):
    if spec.p:
        return Scalar(spec, rng.randrange(spec.p))
    return Scalar(spec, Fraction(rng.randint(-50, 50), rng.randint(1, 50)))


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_field_axioms_on_random_triples(spec):
    rng = random.Random(str(spec))
    one, zero = Scalar(spec, 1), Scalar(spec, 0)
    for _ in range(1000):
        a, b, c = (_random_scalar(spec, rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a and a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert a + zero == a and a * one == a
        assert a + (-a) == zero
        if a:
            assert a * a.inverse() == one
            assert (b / a) * a == b


def test_examples():
    q = FieldSpec.rational()
    f7 = FieldSpec.prime(7)
    assert field_ops(Scalar(q, Fraction(1, 2)), Scalar(q, Fraction(1, 3)), "add") == Fraction(5, 6)
    assert field_ops(Scalar(f7, 3), op="inv").value == 5
    with pytest.raises(DivisionByZeroError):
        field_ops(Scalar(f7, 0), op="inv")
    with pytest.raises(ZeroDivisionError):
        Scalar(q, 1) / Scalar(q, 0)
    assert field_ops(Scalar(f7, 3), Scalar(f7, 10), "eq") is True


def test_mixed_fields_rejected():
    a, b = Scalar(FieldSpec.prime(7), 1), Scalar(FieldSpec.prime(11), 1)
    with pytest.raises(MixedFieldsError):
        a + b
    with pytest.raises(MixedFieldsError):
        field_ops(a, Scalar(FieldSpec.rational(), 1), "mul")


def test_cardinality():
    assert field_cardinality(FieldSpec.prime(101)) == 101
    assert field_cardinality(FieldSpec.prime(2)) == 2
    assert field_cardinality(FieldSpec.rational()) == float("inf")


@given(st.integers(-10**12, 10**12), st.integers(1, 10**12))
def test_rational_normalization_idempotent(n, d):
    q = FieldSpec.rational()
    once = Scalar(q, Fraction(n, d))
    twice = Scalar(q, once.value)
    assert once == twice and once.value.denominator > 0
    assert Scalar.parse(q, str(once)) == once


@given(st.integers(-10**9, 10**9), st.integers(-10**9, 10**9),
       st.sampled_from(["add", "sub", "mul", "div", "neg", "inv"]))
def test_residues_closed(x, y, op):
    f = FieldSpec.prime(101)
    a, b = Scalar(f, x), Scalar(f, y)
    if op in ("div", "inv") and not (b if op == "div" else a):
        return
    out = field_ops(a, b, op)
    assert 0 <= out.value < 101


@pytest.mark.parametrize("bad", [1, 4, 91, 2**31 + 11, 2**31 - 3, 0, -7])
def test_bad_moduli(bad):
    with pytest.raises(ValidationError):
        FieldSpec.prime(bad)


def test_primality_against_trial_division():
    def slow(n):
        return n >= 2 and all(n % q for q in range(2, int(n**0.5) + 1))
    assert all(is_prime(n) == slow(n) for n in range(2000))
    rng = random.Random(31)
    sample = [rng.randrange(2**30, 2**31) for _ in range(3000)] + [2**31 - 1, 2147483629]
    assert all(is_prime(n) == sympy.isprime(n) for n in sample)


def test_sample_scalar_ranges_and_determinism():
    f7 = FieldSpec.prime(7)
    draws = [sample_scalar(f7, random.Random(5)).value for _ in range(3)]
    assert len(set(draws)) == 1 and 0 <= draws[0] < 7
    rng = random.Random(9)
    stream = [sample_scalar(f7, rng).value for _ in range(50)]
    rng = random.Random(9)
    assert stream == [sample_scalar(f7, rng).value for _ in range(50)]
    assert set(stream) <= set(range(7))
    q = FieldSpec.rational()
    rng = random.Random(1)
    assert {sample_scalar(q, rng, bound=1).value for _ in range(100)} == {0, 1}


def test_text_forms():
    q, f = FieldSpec.rational(), FieldSpec.prime(7)
    assert str(Scalar(q, Fraction(-6, 4))) == "-3/2"
    assert str(Scalar(f, -1)) == "6"
    assert f.parse("1/2") == 4
    for bad in ("1.5", "x", "1/0", "2e3"):
        with pytest.raises(ParseError):
            q.parse(bad)
    assert FieldSpec.from_json(f.to_json()) == f
    assert FieldSpec.from_json({"kind": "rational"}) == q
    with pytest.raises(ValidationError):
        FieldSpec.from_json({"kind": "real"})
