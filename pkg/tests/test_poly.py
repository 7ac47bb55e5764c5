import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import RINGS, VARS, coefficients, polynomials
from semiinv.poly import (
    Polynomial,
    coeff_extract,
    from_json,
    multidegree,
    multidegree_split,
    parse,
    serialize,
    substitute,
    to_json,
)
from semiinv.ring import GF, QQ, ZZ, CoefficientRing, parse_var, ring_from_name, var_name, x_var, z_var, w_var


ring_st = st.sampled_from(RINGS)


@settings(max_examples=400)
@given(st.data())
def test_ring_axioms(data):
    ring = data.draw(ring_st)
    f, g, h = (data.draw(polynomials(ring)) for _ in range(3))
    zero, one = Polynomial.zero(ring), Polynomial.one(ring)
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f + zero == f and f * one == f
    assert f - f == zero
    assert (f * zero).is_zero()


@settings(max_examples=300)
@given(st.data())
def test_serialize_round_trip(data):
    ring = data.draw(ring_st)
    f = data.draw(polynomials(ring))
    assert parse(serialize(f), ring) == f
    assert from_json(to_json(f), ring) == f


@settings(max_examples=200)
@given(st.data())
def test_coeff_extract_linear(data):
    ring = data.draw(ring_st)
    f, g = data.draw(polynomials(ring)), data.draw(polynomials(ring))
    c = data.draw(coefficients(ring))
    v = data.draw(st.sampled_from(VARS))
    pattern = {v: data.draw(st.integers(0, 2))}
    lhs = coeff_extract(f * c + g, pattern, {v})
    assert lhs == coeff_extract(f, pattern, {v}) * c + coeff_extract(g, pattern, {v})


@settings(max_examples=200)
@given(st.data())
def test_multidegree_split_partitions(data):
    ring = data.draw(ring_st)
    f = data.draw(polynomials(ring))
    parts = multidegree_split(f, 3)
    total = Polynomial.zero(ring)
    seen = set()
    for d, part in parts.items():
        assert multidegree(part, 3) == d
        assert not seen & set(part.terms)
        seen |= set(part.terms)
        total = total + part
    assert total == f


@settings(max_examples=200)
@given(st.data())
def test_substitute_is_homomorphism(data):
    ring = data.draw(ring_st)
    f, g = data.draw(polynomials(ring)), data.draw(polynomials(ring))
    sub = {v: data.draw(polynomials(ring, max_terms=2, max_degree=1)) for v in VARS[:4]}
    assert substitute(f * g, sub) == substitute(f, sub) * substitute(g, sub)
    assert substitute(f + g, sub) == substitute(f, sub) + substitute(g, sub)


def test_prime_field_reduction():
    f = Polynomial(GF(2), {(x_var(1, 1, 1),): 3})
    g = Polynomial(GF(2), {(x_var(1, 1, 1),): 1})
    assert f == g
    assert (g + g).is_zero()
    q = Polynomial.constant(QQ.parse("1/2"), QQ) * 2
    assert q == Polynomial.one(QQ)


def test_rejects_composite_modulus():
    with pytest.raises(ValueError):
        GF(91)
    with pytest.raises(ValueError):
        CoefficientRing("Integers", 5)
    assert ring_from_name("GF(7)") == GF(7)


def test_mixed_rings_rejected():
    with pytest.raises(ValueError):
        Polynomial.one(ZZ) + Polynomial.one(GF(3))


def test_variable_names_round_trip():
    for code in (x_var(2, 1, 5), z_var(3), w_var(1)):
        assert parse_var(var_name(code)) == code


def test_parse_rejects_garbage():
    for text in ("", "1*y[1]", "x[1,1", "1**x[1,1,1]"):
        with pytest.raises(ValueError):
            parse(text)


def test_coeff_extract_by_class():
    z1, w1 = Polynomial.var(z_var(1)), Polynomial.var(w_var(1))
    x = Polynomial.var(x_var(1, 1, 1))
    f = z1 * w1 * x + z1 * z1 * x + w1
    assert coeff_extract(f, {z_var(1): 1, w_var(1): 1}) == x


def test_evaluate():
    f = parse("2*x[1,1,1]*x[2,2,1] + -1*x[1,2,1]")
    rng = random.Random(0)
    vals = {v: rng.randrange(10) for v in f.variables()}
    expect = 2 * vals[x_var(1, 1, 1)] * vals[x_var(2, 2, 1)] - vals[x_var(1, 2, 1)]
    assert f.evaluate(vals) == expect
