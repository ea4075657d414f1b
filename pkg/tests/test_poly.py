from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccclose.errors import (DimensionCapError, ParseError, PoleError, UnknownVariableError,
                            VariableMismatchError)
from ccclose.poly import (LaurentPoly, MonomialIdeal, Scalar, arith, evaluate, monomial_divide,
                          parse_ideal, parse_poly)

from conftest import XY, laurent_polys, scalars

P = laurent_polys()


def terms(p):
    return dict(p.terms)


# ------------------------------------------------------------- examples

@pytest.mark.parametrize("text, expected", [
    ("x^3 + y^3", {(3, 0): 1, (0, 3): 1}),
    ("0", {}),
    ("(x+y)^2 - x^2 - y^2", {(1, 1): 2}),
    ("1/2*x - 1/2*x", {}),
    ("(1+i)*(1-i)", {(0, 0): 2}),
    ("  x *  y ", {(1, 1): 1}),
])
def test_parse_examples(text, expected):
    assert terms(parse_poly(text, XY)) == {k: Scalar(v) for k, v in expected.items()}


def test_arith_examples():
    x, y = (LaurentPoly.var(XY, v) for v in XY)
    assert not arith("add", x, -x)
    assert arith("mul", x, y) == LaurentPoly.monomial(XY, (1, 1))
    # schoolbook expansion of (x+y)(x-y)
    assert arith("mul", x + y, x - y) == parse_poly("x^2 - y^2", XY)
    assert arith("sub", x, x) == LaurentPoly.zero(XY)


def test_arith_rejects_mismatched_vars():
    with pytest.raises(VariableMismatchError):
        arith("add", parse_poly("x", ("x",)), parse_poly("x", XY))


@pytest.mark.parametrize("p, m, expected", [
    ("x^3*y^2", (3, 0), {(0, 2): 1}),
    ("x^3 + x^2*y", (3, 0), {(0, 0): 1, (-1, 1): 1}),
    ("0", (1, 1), {}),
])
def test_monomial_divide(p, m, expected):
    q = monomial_divide(parse_poly(p, XY), m)
    assert terms(q) == {k: Scalar(v) for k, v in expected.items()}
    assert q * LaurentPoly.monomial(XY, m) == parse_poly(p, XY)


def test_eval_examples():
    assert evaluate(parse_poly("x^2*y^2", XY), (1, 1)) == Scalar(1)
    assert evaluate(parse_poly("1 + t^3", ("t",)), (2,)) == Scalar(9)
    with pytest.raises(PoleError):
        evaluate(LaurentPoly.monomial(("x",), (-1,)), (0,))


@pytest.mark.parametrize("bad", ["x^", "x + * y", "(x", "x^-1", "x^1.5", "2x)"])
def test_parse_errors_have_position(bad):
    with pytest.raises(ParseError):
        parse_poly(bad, XY)


def test_unknown_variable():
    with pytest.raises(UnknownVariableError):
        parse_poly("x*w", XY)


def test_laurent_parse_allows_negative_powers():
    p = parse_poly("x^-1*y", XY, laurent=True)
    assert terms(p) == {(-1, 1): Scalar(1)}


# ------------------------------------------------------------- scalars

def test_scalar_normal_form():
    s = Scalar(Fraction(2, -4), Fraction(0))
    assert s.re == Fraction(-1, 2) and s.re.denominator > 0
    assert s.to_json() == "-1/2"
    assert Scalar.from_json(s.to_json()) == s
    z = Scalar(1, 2)
    assert Scalar.from_json(z.to_json()) == z
    assert (z * z.conj()) == Scalar(5)


def test_parsed_real_input_has_zero_imaginary_part():
    p = parse_poly("3/4*x^2 - 7", XY)
    assert all(c.im == 0 for c in p.terms.values())


@given(scalars, scalars)
def test_scalar_division(a, b):
    if b:
        assert (a / b) * b == a


# ------------------------------------------------------------- ring axioms

@settings(max_examples=400, deadline=None)
@given(P, P, P)
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p + q == q + p
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert p - p == LaurentPoly.zero(XY)
    assert p * LaurentPoly.one(XY) == p


@settings(max_examples=300, deadline=None)
@given(P, P, st.tuples(scalars, scalars))
def test_eval_is_homomorphism(p, q, pt):
    if any(not c for c in pt):
        pt = (Scalar(1, 1), Scalar(2))
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
    assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)


@settings(max_examples=300, deadline=None)
@given(laurent_polys(min_exp=0))
def test_parse_print_roundtrip(p):
    assert parse_poly(str(p), XY) == p


@settings(max_examples=200, deadline=None)
@given(P)
def test_laurent_parse_print_roundtrip(p):
    assert parse_poly(str(p), XY, laurent=True) == p


@given(P)
def test_canonical_form_has_no_zero_terms(p):
    assert all(c for c in p.terms.values())
    assert all(len(e) == 2 for e in p.terms)
    assert hash(p) == hash(LaurentPoly(XY, dict(p.terms)))


@given(P)
def test_conj_is_involution(p):
    assert p.conj().conj() == p


# ------------------------------------------------------------- monomial ideals

def test_ideal_is_minimalized_in_input_order():
    I = parse_ideal("y^3, x*y^4, x^3, x^5*y", XY)
    assert I.gens == ((0, 3), (3, 0))


def test_ideal_membership_and_vanishing():
    I = parse_ideal("x^2,y^2,x*y*z", ("x", "y", "z"))
    assert I.contains_monomial((1, 1, 1))
    assert not I.contains_monomial((1, 1, 0))
    assert I.vanishing_supports() == [(0, 1), (0, 1, 2)]
    assert not I.is_m_primary()
    assert parse_ideal("x^3,y^3", XY).is_m_primary()


def test_generators_must_be_monomials():
    with pytest.raises(ParseError):
        parse_ideal("x+y", XY)


def test_dimension_cap():
    with pytest.raises(DimensionCapError):
        parse_ideal("a,b,c,d", ("a", "b", "c", "d"))


def test_ideal_equality_ignores_redundant_generators():
    assert parse_ideal("x^3,y^3,x^3*y", XY) == MonomialIdeal(XY, [(3, 0), (0, 3)])
