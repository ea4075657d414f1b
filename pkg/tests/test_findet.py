import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccclose.descent import finite_problem, fibre_over_orbit, from_ideal, section_rows
from ccclose.findet import (PointDomain, TorusDomain, brute_force_in_span, certificate_from_json,
                            fiber_span_test, finite_fibre_test, orbit_order, sci0_membership,
                            valuation_obstruction, verify_valuation, verify_wronskian,
                            verify_wronskian_points, wronskian_test)
from ccclose.linalg import det
from ccclose.newton import blowup_charts
from ccclose.poly import LaurentPoly, Scalar, parse_ideal, parse_poly

from conftest import XY, XYZ

T = ("t",)


def t_poly(text):
    return parse_poly(text, T)


# ---------------------------------------------------------------- examples

def test_basis_combination_is_in_span():
    res = wronskian_test([t_poly("1"), t_poly("t^3")], t_poly("1 + 2*t^3"), TorusDomain(T))
    assert res.status == "InSpan"
    assert res.coeffs == (Scalar(1), Scalar(2))


def test_t_squared_certificate():
    res = wronskian_test([t_poly("1"), t_poly("t^3")], t_poly("t^2"), TorusDomain(T))
    assert res.status == "NotInSpan"
    cert = res.certificate
    assert cert.points == ((1,), (2,), (3,))
    assert [[int(x.re) for x in row] for row in cert.matrix] == [[1, 1, 1], [1, 8, 27], [1, 4, 9]]
    assert cert.det_value == Scalar(-22)
    # independent cofactor expansion
    m = [[1, 1, 1], [1, 8, 27], [1, 4, 9]]
    cof = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    assert cof == -22
    assert verify_wronskian_points(cert, [t_poly("1"), t_poly("t^3")], t_poly("t^2"))


def test_zero_section():
    res = wronskian_test([t_poly("t + 1")], t_poly("0"), TorusDomain(T))
    assert res.status == "InSpan" and res.coeffs == (Scalar(0),)


def test_dependent_functions_are_reduced():
    funcs = [t_poly("t"), t_poly("2*t"), t_poly("1")]
    res = wronskian_test(funcs, t_poly("3*t + 1"), TorusDomain(T))
    assert res.status == "InSpan"
    # fewest non-zero entries, then lexicographically smallest support
    assert res.coeffs == (Scalar(3), Scalar(0), Scalar(1))
    res = wronskian_test(funcs, t_poly("t^2"), TorusDomain(T))
    assert res.status == "NotInSpan" and res.certificate.rank_F == 2


def test_empty_domain():
    with pytest.raises(Exception):
        wronskian_test([t_poly("1")], t_poly("t"), PointDomain(T, ()))


# ---------------------------------------------------------------- finite models

def random_instance(rng):
    r = rng.randint(1, 4)
    F = rng.choice([1, 1, 2])
    npts = rng.randint(1, 8 // F)
    vals = lambda: Fraction(rng.randint(-2, 2))
    mats = []
    for _ in range(npts):
        mats.append([[vals() for _ in range(r)] for _ in range(F)])
    if rng.random() < 0.5:
        c = [vals() for _ in range(r)]
        phi = [[sum(ci * row[i] for i, ci in enumerate(c)) for row in m] for m in mats]
    else:
        phi = [[vals() for _ in range(F)] for _ in range(npts)]
    D = finite_problem(XY, [f"y{k}" for k in range(npts)], ["o"] * npts, mats, r)
    return D, phi


def brute_force(D, phi):
    rows = []
    for m, ph in zip(D.model.matrices, phi):
        for a, row in enumerate(m):
            rows.append(list(row) + [Scalar.coerce(ph[a])])
    from ccclose.linalg import rank
    r = D.E_rank
    return rank(rows) == rank([row[:r] for row in rows])


@pytest.mark.parametrize("block", range(10))
def test_wronskian_agrees_with_brute_force(block):
    rng = random.Random(1000 + block)
    for _ in range(100):
        D, phi = random_instance(rng)
        res = finite_fibre_test(D, phi, "o")
        assert res.in_span == brute_force(D, phi)
        if not res.in_span:
            assert res.certificate.det_value
            assert res.certificate.recheck()
            assert len(res.certificate.points) <= D.E_rank + 1


@pytest.mark.parametrize("block", range(5))
def test_subset_bound_is_sharp(block):
    rng = random.Random(5000 + block)
    for _ in range(100):
        D, phi = random_instance(rng)
        small = finite_fibre_test(D, phi, "o")
        every = finite_fibre_test(D, phi, "o", subset_limit=8)
        assert small.in_span == every.in_span


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=2, max_size=4),
       st.lists(st.integers(1, 6), min_size=1, max_size=3, unique=True))
def test_torus_and_point_domains_agree_on_big_point_sets(cs, exps):
    funcs = [LaurentPoly.monomial(T, (e,)) for e in exps]
    phi = LaurentPoly(T, {(k,): c for k, c in enumerate(cs)})
    torus = wronskian_test(funcs, phi, TorusDomain(T))
    pts = tuple((k,) for k in range(1, 12))
    assert torus.in_span == brute_force_in_span(funcs, phi, pts)
    if torus.in_span:
        total = LaurentPoly.zero(T)
        for c, f in zip(torus.coeffs, funcs):
            total = total + f.scale(c)
        assert total == phi
    else:
        assert verify_wronskian_points(torus.certificate, funcs, phi)


# ---------------------------------------------------------------- fibre tests

@pytest.fixture
def cube():
    return from_ideal(parse_ideal("x^3,y^3", XY))


def test_fibre_member(cube):
    res = fiber_span_test(cube, parse_poly("x^2*y^2", XY), (0, 1))
    assert res.status == "InSpan"
    assert all(not c for c in res.coeffs)


def test_fibre_non_member(cube):
    g = parse_poly("x*y^2", XY)
    res = fiber_span_test(cube, g, (0, 1))
    assert res.status == "NotInSpan"
    cert = res.certificate
    assert cert.det_value == Scalar(-22)
    assert verify_wronskian(cert, parse_ideal("x^3,y^3", XY), g)


@pytest.mark.parametrize("S", [(), (0,), (1,)])
def test_off_VI_always_in_span(cube, S):
    res = fiber_span_test(cube, parse_poly("x*y + 7", XY), S)
    assert res.status == "InSpan"


def test_certificate_json_roundtrip(cube):
    g = parse_poly("x^2*y", XY)
    cert = fiber_span_test(cube, g, (0, 1)).certificate
    again = certificate_from_json(cert.to_json())
    assert again == cert
    assert verify_wronskian(again, parse_ideal("x^3,y^3", XY), g)


def test_tampered_certificate_rejected(cube):
    g = parse_poly("x*y^2", XY)
    doc = fiber_span_test(cube, g, (0, 1)).certificate.to_json()
    doc["det"] = "-21/1"
    assert not verify_wronskian(certificate_from_json(doc), parse_ideal("x^3,y^3", XY), g)
    doc = fiber_span_test(cube, g, (0, 1)).certificate.to_json()
    doc["points"][0]["coords"] = ["1/1", "1/1"]       # off the exceptional fibre
    assert not verify_wronskian(certificate_from_json(doc), parse_ideal("x^3,y^3", XY), g)


@pytest.mark.parametrize("g, member", [("x^2*y^2", True), ("x*y^2", False), ("x^3", True),
                                       ("x^2*y + x*y^2", False)])
def test_sci0(cube, g, member):
    rep = sci0_membership(cube, parse_poly(g, XY))
    assert rep.member is member
    if not member:
        bad = [r for r in rep.results if not r.in_span]
        assert bad and bad[0].stratum == (0, 1)


def test_orbit_order_deepest_first():
    I = parse_ideal("x^2,y^2,x*y*z", XYZ)
    assert orbit_order(I) == [(0, 1, 2), (0, 1)]


# ---------------------------------------------------------------- parametric

@pytest.mark.parametrize("g", ["x^2*z", "x*y*z^2", "x*y", "y^2*z + x*y*z", "x^2 + y^2*z^3"])
def test_parametric_specialisation(g):
    I = parse_ideal("x^2,y^2,x*y*z", XYZ)
    D = from_ideal(I)
    poly = parse_poly(g, XYZ)
    res = fiber_span_test(D, poly, (0, 1))
    if not res.in_span:
        assert verify_wronskian(res.certificate, I, poly)
        return
    F = fibre_over_orbit(D, (0, 1))
    g_rows = section_rows(F, poly)
    rng = random.Random(11)
    for _ in range(5):
        z = Fraction(rng.randint(1, 20), rng.randint(1, 7))
        c = [co.evaluate((z,)) for co in res.coeffs]
        for pc, grow in zip(F.model.pieces, g_rows):
            # substitute the parameter, keep the fibre coordinates symbolic
            sub = [LaurentPoly.const(pc.vars, z)] + [LaurentPoly.var(pc.vars, v) for v in pc.coords]
            lhs = LaurentPoly.zero(pc.vars)
            for ci, f in zip(c, pc.f_rows[0]):
                lhs = lhs + f.substitute(sub).scale(ci)
            assert lhs == grow[0].substitute(sub)


def test_hochster_xy_refuted_at_origin():
    I = parse_ideal("x^2,y^2,x*y*z", XYZ)
    res = fiber_span_test(from_ideal(I), parse_poly("x*y", XYZ), (0, 1, 2))
    assert res.status == "NotInSpan"


# ---------------------------------------------------------------- valuations

@pytest.mark.parametrize("g", ["x*y", "x^2", "y + x^5", "x*y^2 + y^2"])
def test_valuation_certificate(g):
    I = parse_ideal("x^3,y^3", XY)
    poly = parse_poly(g, XY)
    cert = valuation_obstruction(blowup_charts(I), poly)
    assert cert is not None
    assert verify_valuation(cert, I, poly)
    assert verify_valuation(certificate_from_json(cert.to_json()), I, poly)


@pytest.mark.parametrize("g", ["x^2*y", "x^2*y^2", "x^3 + y^3"])
def test_integral_elements_have_no_valuation_certificate(g):
    I = parse_ideal("x^3,y^3", XY)
    assert valuation_obstruction(blowup_charts(I), parse_poly(g, XY)) is None


def test_det_helper_matches_certificate():
    m = [[Scalar(1), Scalar(1), Scalar(1)], [Scalar(1), Scalar(8), Scalar(27)],
         [Scalar(1), Scalar(4), Scalar(9)]]
    assert det(m) == Scalar(-22)
