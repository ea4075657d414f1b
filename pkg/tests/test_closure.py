import json
import random

import pytest

from ccclose.closure import (IN, OUT, UNDETERMINED, build_fd_scion, closure_monomials,
                             decide_membership, monomials_up_to, relative_membership,
                             relative_problem, tabulate, verify_verdict_document)
from ccclose.descent import from_ideal
from ccclose.errors import DimensionCapError, PreconditionError, VariableMismatchError
from ccclose.poly import I_UNIT, LaurentPoly, MonomialIdeal, Scalar, parse_ideal, parse_poly

from conftest import XY, XYZ, random_poly

GOLDEN = [
    ("x^3,y^3", "x^2*y^2", IN),
    ("x^3,y^3", "x*y^2", OUT),
    ("x^3,y^3", "x^2*y", OUT),
    ("x^3,y^3", "x*y", OUT),
    ("x^3,y^3", "x^3 + x^2*y^2", IN),
    ("x^3,y^3", "x^4 + 3*x^2*y^2 - y^5", IN),
    ("x^2,y^2", "x*y", OUT),
    ("x^2,y^2", "x^2*y + x*y^2", IN),
    ("x", "x^2 + x*y", IN),
    ("x", "y", OUT),
    ("x^2,x*y,y^3", "x*y^2 + y^4", IN),
    ("x^4,y^2", "x^2*y", OUT),
    ("x^4,y^2", "x^3*y", IN),
]


def decide(ideal, g, vs=XY, **kw):
    return decide_membership(parse_ideal(ideal, vs), parse_poly(g, vs), **kw)


@pytest.mark.parametrize("ideal, g, status", GOLDEN)
def test_golden(ideal, g, status):
    v = decide(ideal, g)
    assert v.status == status
    ok, msg = verify_verdict_document(json.loads(v.dumps()))
    assert ok, msg


def test_refutation_carries_minus_22():
    v = decide("x^3,y^3", "x*y^2")
    doc = v.to_json()
    assert doc["certificate"]["det"] == "-22/1"
    assert doc["certificate"]["kind"] == "wronskian"


def test_fast_path_multipliers():
    v = decide("x^3,y^3", "x^4 - 2*y^3")
    assert v.status == IN
    assert [str(h) for h in v.multipliers] == ["x", "-2"]
    assert v.trace[0]["step"] == "algebraic"


def test_input_checks():
    I = parse_ideal("x^3,y^3", XY)
    with pytest.raises(VariableMismatchError):
        decide_membership(I, parse_poly("x", ("x",)))
    with pytest.raises(PreconditionError):
        decide_membership(I, parse_poly("x^-1", XY, laurent=True))
    with pytest.raises(DimensionCapError):
        decide_membership(MonomialIdeal(("a", "b", "c", "d"), [(1, 0, 0, 0)]),
                          LaurentPoly.one(("a", "b", "c", "d")))


def test_json_is_deterministic():
    a = decide("x^3,y^3", "x*y^2", seed=3).dumps()
    b = decide("x^3,y^3", "x*y^2", seed=3).dumps()
    assert a == b


# ------------------------------------------------------------- undetermined

def test_undetermined_is_reported_with_reason():
    I = MonomialIdeal(XYZ, [(3, 3, 1), (0, 3, 3)])
    v = decide_membership(I, parse_poly("-2*x^2*y^3*z^2", XYZ))
    assert v.status == UNDETERMINED
    assert "pole" in v.certificate
    assert verify_verdict_document(json.loads(v.dumps()))[0]


# ------------------------------------------------------------- tabulation

def test_closure_monomials_cube():
    got = set(closure_monomials(parse_ideal("x^3,y^3", XY), 4))
    assert {(3, 0), (0, 3), (2, 2), (3, 1), (1, 3), (4, 0), (0, 4)} <= got
    assert not {(1, 2), (2, 1)} & got


def test_closure_monomials_principal():
    assert closure_monomials(parse_ideal("x", ("x",)), 2) == [(1,), (2,)]


def test_closure_monomials_square_excludes_xy():
    # xy = phi_1 x^2 + phi_2 y^2 on y = lambda x forces phi_1(0) + lambda^2 phi_2(0) = lambda
    got = closure_monomials(parse_ideal("x^2,y^2", XY), 3)
    assert (1, 1) not in got
    assert {(2, 0), (0, 2), (2, 1), (1, 2)} <= set(got)


def test_tabulation_bound():
    with pytest.raises(PreconditionError):
        closure_monomials(parse_ideal("x", ("x",)), 13)
    rows = tabulate(parse_ideal("x^2,y^2", XY), 2)
    assert [e for e, _ in rows] == monomials_up_to(2, 2)


# ------------------------------------------------------------- properties

@pytest.mark.parametrize("ideal, vs", [("x^3,y^3", XY), ("x^2,y^2", XY),
                                       ("x^2,y^2,x*y*z", XYZ), ("x*y,y*z", XYZ)])
def test_ideal_contained_in_closure(ideal, vs):
    I = parse_ideal(ideal, vs)
    rng = random.Random(17)
    for a in I.gens:
        assert decide_membership(I, LaurentPoly.monomial(vs, a)).status == IN
    for _ in range(50):
        g = LaurentPoly.zero(vs)
        for a in I.gens:
            g = g + random_poly(rng, vs, 2, 2) * LaurentPoly.monomial(vs, a)
        v = decide_membership(I, g)
        assert v.status == IN
        assert not g or v.trace[0]["step"] == "algebraic"


@pytest.mark.parametrize("ideal", ["x^3,y^3", "x^2,y^2"])
def test_ideal_property(ideal):
    I = parse_ideal(ideal, XY)
    members = [LaurentPoly.monomial(XY, e) for e in closure_monomials(I, 4)]
    rng = random.Random(ideal)
    for _ in range(20):
        g1, g2 = rng.choice(members), rng.choice(members)
        h = random_poly(rng, XY, 2, 3)
        assert decide_membership(I, g1 + g2.scale(rng.randint(-3, 3))).status == IN
        assert decide_membership(I, h * g1).status == IN


def permute_exp(e, perm):
    out = [0] * len(e)
    for k, x in enumerate(e):
        out[perm[k]] = x
    return tuple(out)


def permute_poly(p, perm, vs):
    return LaurentPoly(vs, {permute_exp(e, perm): c for e, c in p.terms.items()})


def invariance_cases(n_cases, seed=23):
    rng = random.Random(seed)
    ideals = ["x^3,y^3", "x^2,y^2", "x^4,x*y,y^3", "x^2*y,y^2,x^3"]
    for k in range(n_cases):
        I = parse_ideal(ideals[k % len(ideals)], XY)
        g = random_poly(rng, XY, 4, rng.randint(1, 3))
        yield k % 4, I, g, rng


def check_invariance(kind, I, g, rng):
    base = decide_membership(I, g).status
    vs = I.vars
    if kind == 0:
        perm = (1, 0)
        J = MonomialIdeal(vs, [permute_exp(a, perm) for a in I.gens])
        other = decide_membership(J, permute_poly(g, perm, vs)).status
    elif kind == 1:
        lam = [Scalar(rng.randint(1, 4), rng.randint(-2, 2)) for _ in vs]
        imgs = [LaurentPoly.monomial(vs, [int(i == j) for j in range(len(vs))], lam[i])
                for i in range(len(vs))]
        gens = list(I.gens)
        coeffs = []
        for a in gens:
            c = Scalar(1)
            for li, ai in zip(lam, a):
                c = c * li ** ai
            coeffs.append(c)
        other = decide_membership(I, g.substitute(imgs), gens, coeffs).status
    elif kind == 2:
        unit = Scalar(rng.randint(1, 3), rng.choice([-1, 1]))
        coeffs = [Scalar(rng.randint(1, 3), rng.randint(-2, 2)) or Scalar(1) for _ in I.gens]
        other = decide_membership(I, g.scale(unit), list(I.gens), coeffs).status
        assert other == base
        other = decide_membership(I, g + g.scale(I_UNIT)).status
    else:
        gens = list(I.gens) + [I.gens[rng.randrange(len(I.gens))]]
        other = decide_membership(I, g, gens, [1] * len(gens)).status
    return base, other


@pytest.mark.parametrize("kind, I, g, rng", list(invariance_cases(40)))
def test_invariance(kind, I, g, rng):
    base, other = check_invariance(kind, I, g, rng)
    assert base == other


@pytest.mark.parametrize("small, big", [("x^3,y^3", "x^2,y^2"), ("x^3,y^3", "x^3,y^2"),
                                        ("x^4,y^4", "x^3,x*y,y^3")])
def test_monotonicity(small, big):
    I, J = parse_ideal(small, XY), parse_ideal(big, XY)
    assert all(J.contains_monomial(a) for a in I.gens)
    for e in monomials_up_to(2, 6):
        g = LaurentPoly.monomial(XY, e)
        if decide_membership(I, g).status == IN:
            assert decide_membership(J, g).status == IN


# ------------------------------------------------------------- relative and scions

def test_relative_membership():
    I = parse_ideal("x^3,y^3", XY)
    D = from_ideal(I)
    g = parse_poly("x^2*y^2", XY)
    RP = relative_problem(D, [(0, 1)], g)
    assert RP.vanishing
    assert relative_membership(RP, g).status == IN
    zero = LaurentPoly.zero(XY)
    assert relative_membership(relative_problem(D, [(0, 1)], zero), zero).status == IN
    bad = parse_poly("x*y^2", XY)
    RP = relative_problem(D, [(0, 1)], bad)
    assert not RP.vanishing
    with pytest.raises(PreconditionError):
        relative_membership(RP, bad)


def test_fd_scion_cube():
    D = from_ideal(parse_ideal("x^3,y^3", XY))
    S = build_fd_scion(D)
    kinds = [n.kind for n in S.provenance.lineage()]
    assert kinds == ["root", "restrict", "diagonal", "factor"]
    assert S.F_rank == 3
    pc = next(p for p in S.model.pieces if p.label == "x".join(["chart0|T=(0,)"] * 3))
    assert [[str(x) for x in r] for r in pc.f_rows] == [
        ["1", "t0_0_1_1^3"], ["1", "t0_0_1_2^3"], ["1", "t0_0_1_3^3"]]


def test_fd_scion_principal_is_unchanged():
    D = from_ideal(parse_ideal("x", ("x",)))
    assert build_fd_scion(D) is D


def test_fd_scion_over_point_base():
    S = build_fd_scion(from_ideal(parse_ideal("x^2,y^2", XY)))
    nodes = S.provenance.lineage()
    assert nodes[1].param("Z") == ((0, 1),)
    assert nodes[2].param("copies") == 3
    assert all(pc.params == () for pc in S.model.pieces)
    assert all(len(pc.f_rows) == 3 for pc in S.model.pieces)


# ------------------------------------------------------------- verification

def test_tampered_witness_rejected():
    doc = json.loads(decide("x^3,y^3", "x^2*y^2").dumps())
    doc["witness"]["numerators"][0] = doc["witness"]["numerators"][1]
    assert not verify_verdict_document(doc)[0]


def test_tampered_multipliers_rejected():
    doc = json.loads(decide("x^3,y^3", "x*y^2").dumps())
    doc["certificate"]["multipliers"] = ["1", "0"]
    assert not verify_verdict_document(doc)[0]


def test_verdict_for_other_problem_rejected():
    doc = json.loads(decide("x^3,y^3", "x^2*y^2").dumps())
    doc["candidate"] = "x*y^2"
    assert not verify_verdict_document(doc)[0]
