import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gfl.fields import (FieldSpec, binom_mod_p, bracket, default_field, frobenius, inv, mul,
                        parse_field, seq_bracket)

SMALL_Q = (2, 3, 4, 5, 7, 8, 9)


def test_gf2_unit():
    F = default_field(2)
    assert mul(F(1), F(1)) == F(1)
    assert inv(F(1)) == F(1)
    assert frobenius(F(1), 1) == F(1)


def test_gf4_relation():
    F = FieldSpec(2, 2, (1, 1, 1))
    t = F.t
    assert mul(t, t) == F([1, 1])
    assert inv(t) == F([1, 1])
    assert frobenius(t, 1) == F([1, 1])


def test_gf9_relation():
    F = FieldSpec(3, 2, (1, 0, 1))
    assert mul(F.t, F.t) == F(2)


def test_gf5_inverse():
    F = default_field(5)
    assert inv(F(2)) == F(3)


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        inv(default_field(4).zero)


def test_mismatched_fields_rejected():
    with pytest.raises(ValueError):
        mul(default_field(2)(1), default_field(3)(1))


@pytest.mark.parametrize("poly", [(1, 0, 1), (0, 1, 1)])
def test_reducible_poly_rejected(poly):
    with pytest.raises(ValueError):
        FieldSpec(2, 2, poly)


def test_bad_constructions():
    for args in [(4, 1, (1, 1)), (2, 0, (1,)), (2, 2, (1, 1)), (2, 2, (1, 1, 2))]:
        with pytest.raises(ValueError):
            FieldSpec(*args)


@pytest.mark.parametrize("q", SMALL_Q)
def test_field_axioms_exhaustive(q):
    F = default_field(q)
    els = F.elements()
    for a, b in itertools.product(els, repeat=2):
        assert a * b == b * a
        assert a + b == b + a
    for a, b, c in itertools.product(els, repeat=3):
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("q", SMALL_Q)
def test_unit_group_cyclic(q):
    F = default_field(q)
    assert any(x.order() == q - 1 for x in F.elements()[1:])
    for x in F.elements()[1:]:
        assert x ** (q - 1) == F.one
        assert x * inv(x) == F.one


@pytest.mark.parametrize("q", SMALL_Q)
def test_frobenius_is_automorphism(q):
    F = default_field(q)
    for a, b in itertools.product(F.elements(), repeat=2):
        assert frobenius(a + b) == frobenius(a) + frobenius(b)
        assert frobenius(a * b) == frobenius(a) * frobenius(b)
    for a in F.elements():
        assert frobenius(a, F.m) == a
        assert frobenius(a) == a ** F.p


def test_polynomial_multiplication_matches_tables():
    # schoolbook product reduced by the defining polynomial
    F = FieldSpec(3, 2, (2, 2, 1))
    for a, b in itertools.product(range(9), repeat=2):
        ca, cb = F.decode(a), F.decode(b)
        prod = [0] * 3
        for i, x in enumerate(ca):
            for j, y in enumerate(cb):
                prod[i + j] += x * y
        # t^2 = -(2 + 2t)
        prod[0] -= 2 * prod[2]
        prod[1] -= 2 * prod[2]
        assert F.mul(a, b) == F.encode([prod[0] % 3, prod[1] % 3])


def test_binom_examples():
    assert binom_mod_p(7, 3, 2) == 1
    assert binom_mod_p(4, 2, 2) == 0
    assert binom_mod_p(1 + 4, 1, 2) == 1
    assert binom_mod_p(3, 5, 2) == 0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_binom_against_integers(p):
    for n in range(65):
        for k in range(n + 1):
            assert binom_mod_p(n, k, p) == comb(n, k) % p


def test_bracket():
    assert bracket(3, 2) == 7
    assert bracket(0, 5) == 0
    assert seq_bracket((4, 2), 2) == 18
    with pytest.raises(ValueError):
        bracket(-1, 2)


def test_parse_field_forms():
    assert parse_field("4") == default_field(4)
    assert parse_field("2,2") == default_field(4)
    F = parse_field("2,2,1,1,1")
    assert (F.p, F.m, F.poly) == (2, 2, (1, 1, 1))
    assert parse_field(F.describe()) == F
    for bad in ("6", "x", "2,2,1,0,1"):
        with pytest.raises(ValueError):
            parse_field(bad)


def test_json_coefficients():
    F = default_field(9)
    assert F.t.to_json() == [0, 1]
    assert F(F.t.to_json()) == F.t


def test_vector_ops_match_scalars():
    for q in (4, 9, 16, 25):
        F = default_field(q)
        a, b = np.meshgrid(np.arange(q), np.arange(q))
        a, b = a.ravel().astype(F.dtype), b.ravel().astype(F.dtype)
        assert [F.mul(int(x), int(y)) for x, y in zip(a, b)] == F.vmul(a, b).tolist()
        assert [F.add(int(x), int(y)) for x, y in zip(a, b)] == F.vadd(a, b).tolist()


def test_large_field_log_tables():
    F = default_field(1024)
    rng = np.random.default_rng(1)
    x = rng.integers(1, 1024, 200)
    for a in x:
        assert F.mul(int(a), F.inv(int(a))) == 1
        assert F.pow(int(a), 1023) == 1


@settings(max_examples=200, deadline=None)
@given(q=st.sampled_from(SMALL_Q), a=st.integers(0, 10_000), b=st.integers(0, 10_000),
       c=st.integers(0, 10_000))
def test_distributive_property(q, a, b, c):
    F = default_field(q)
    x, y, z = F.element(a % q), F.element(b % q), F.element(c % q)
    assert x * (y + z) == x * y + x * z
    assert (x - y) + y == x
