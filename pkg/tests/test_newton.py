import random
from itertools import combinations

import pytest

from ccclose.errors import ZeroIdealError
from ccclose.newton import (blowup_charts, coords_in_cone, dot, exceptional_strata,
                            fiber_parametrization, int_det, newton_polyhedron, normal_fan,
                            strata_over)
from ccclose.poly import LaurentPoly, MonomialIdeal, parse_ideal

from conftest import XY, XYZ

CORPUS = [
    (XY, "x^3,y^3"),
    (XY, "x^2,y^2"),
    (("x",), "x"),
    (XY, "x^2,x*y,y^3"),
    (XY, "x^5,x^2*y,y^4"),
    (XY, "x*y"),
    (XYZ, "x^2,y^2,x*y*z"),
    (XYZ, "x^2,y^3,z^2"),
    (XYZ, "x*y,y*z,x*z"),
]
IDS = [t for _, t in CORPUS]


def atlas_of(vs, text):
    return blowup_charts(parse_ideal(text, vs))


@pytest.mark.parametrize("vs, text, vertices", [
    (XY, "x^3,y^3", {(3, 0), (0, 3)}),
    (("x",), "x", {(1,)}),
    (XY, "x^2,x*y,y^2", {(2, 0), (0, 2)}),
    # (1,1,1) = (2,0,0)/2 + (0,2,0)/2 + (0,0,1) sits in hull + orthant
    (XYZ, "x^2,y^2,x*y*z", {(2, 0, 0), (0, 2, 0)}),
])
def test_vertices(vs, text, vertices):
    P = newton_polyhedron(parse_ideal(text, vs))
    assert set(P.vertices) == vertices
    assert set(P.vertices) <= set(P.generators)


def test_zero_ideal_rejected():
    with pytest.raises(ZeroIdealError):
        newton_polyhedron(MonomialIdeal(XY, []))


@pytest.mark.parametrize("text", ["x^3,y^3", "x^2,y^2"])
def test_two_dimensional_fans(text):
    F = normal_fan(newton_polyhedron(parse_ideal(text, XY)))
    assert set(F.rays) == {(1, 0), (1, 1), (0, 1)}
    assert len(F.max_cones) == 2


def test_principal_ideal_single_cone():
    A = atlas_of(("x",), "x")
    assert A.fan.rays == ((1,),)
    (ch,) = A.charts
    assert [str(m) for m in ch.map_to_X(("x",))] == ["u0_1"]
    assert [str(f) for f in ch.f_tilde] == ["1"]


def test_cube_charts():
    A = atlas_of(XY, "x^3,y^3")
    c0, c1 = A.charts
    assert [str(m) for m in c0.map_to_X(XY)] == ["u0_1", "u0_1*u0_2"]
    assert c0.e_generator == (3, 0)
    assert [str(f) for f in c0.f_tilde] == ["1", "u0_2^3"]
    assert [str(m) for m in c1.map_to_X(XY)] == ["u1_1*u1_2", "u1_2"]
    assert [str(f) for f in c1.f_tilde] == ["u1_1^3", "1"]


@pytest.mark.parametrize("vs, text", CORPUS, ids=IDS)
def test_fan_is_unimodular(vs, text):
    A = atlas_of(vs, text)
    for k in range(len(A.fan.max_cones)):
        assert abs(int_det(A.fan.cone_rays(k))) == 1


@pytest.mark.parametrize("vs, text", CORPUS, ids=IDS)
def test_fan_completeness(vs, text):
    A = atlas_of(vs, text)
    rng = random.Random(7)
    n = len(vs)
    for _ in range(1000):
        v = tuple(rng.randint(0, 12) for _ in range(n))
        owners = [k for k in range(len(A.fan.max_cones)) if A.fan.contains(k, v)]
        assert owners, v
        # a vector in two cones lies on their shared face
        for a, b in combinations(owners, 2):
            shared = set(A.fan.max_cones[a]) & set(A.fan.max_cones[b])
            lam = coords_in_cone(A.fan.cone_rays(a), v)
            support = {A.fan.max_cones[a][i] for i, x in enumerate(lam) if x}
            assert support <= shared


@pytest.mark.parametrize("vs, text", CORPUS, ids=IDS)
def test_selected_vertex_minimises_on_cone(vs, text):
    A = atlas_of(vs, text)
    for ch in A.charts:
        for r in ch.rays:
            assert dot(r, ch.e_generator) == A.polyhedron.order(r)


@pytest.mark.parametrize("vs, text", CORPUS, ids=IDS)
def test_principality(vs, text):
    A = atlas_of(vs, text)
    for ch in A.charts:
        assert any(f.is_constant() and f for f in ch.f_tilde)
        for a, ft in zip(A.generators, ch.f_tilde):
            assert ft.is_polynomial()
            f = LaurentPoly.monomial(vs, a)
            assert ft * LaurentPoly.monomial(ch.coords, ch.e_exponent) == ch.pullback(f)


@pytest.mark.parametrize("vs, text", CORPUS, ids=IDS)
def test_chart_gluing(vs, text):
    A = atlas_of(vs, text)
    for s, d in combinations(range(len(A.charts)), 2):
        for src, dst in ((s, d), (d, s)):
            N = A.transition(src, dst)
            cs, cd = A.charts[src], A.charts[dst]
            images = [LaurentPoly.monomial(cs.coords, [N[k][l] for k in range(len(vs))])
                      for l in range(len(vs))]
            shift = A.transition_monomial(src, dst)
            for fs, fd in zip(cs.f_tilde, cd.f_tilde):
                assert fd.substitute(images) == fs.shift(shift)
            # both charts send the torus to the same point of X
            for xs, xd in zip(cs.map_to_X(vs), cd.map_to_X(vs)):
                assert xd.substitute(images) == xs


def test_cube_strata():
    A = atlas_of(XY, "x^3,y^3")
    ch0 = [s for s in exceptional_strata(A) if s.chart == 0]
    flags = {s.zero_set: s.exceptional for s in ch0}
    assert flags == {(): False, (0,): True, (1,): False, (0, 1): True}


def test_principal_strata():
    A = atlas_of(("x",), "x")
    flags = {s.zero_set: s.exceptional for s in exceptional_strata(A)}
    assert flags == {(): False, (0,): True}


def test_hochster_z_axis_has_parameter():
    A = atlas_of(XYZ, "x^2,y^2,x*y*z")
    over = strata_over(A, (0, 1))
    assert over
    for s in over:
        Tc, Sc, B, K = fiber_parametrization(A.charts[s.chart], s.zero_set, (0, 1))
        assert Sc == [2]
        assert len(B[0]) == 1


@pytest.mark.parametrize("vs, text", CORPUS, ids=IDS)
def test_exceptional_strata_meet_nonzero_generator(vs, text):
    A = atlas_of(vs, text)
    for s in exceptional_strata(A, exceptional_only=True):
        ch = A.charts[s.chart]
        assert any(f.restrict_zero(s.zero_set) for f in ch.f_tilde)


@pytest.mark.parametrize("vs, text", CORPUS, ids=IDS)
def test_strata_partition_charts(vs, text):
    A = atlas_of(vs, text)
    for ch in A.charts:
        zs = [s.zero_set for s in exceptional_strata(A) if s.chart == ch.index]
        assert len(zs) == len(set(zs)) == 2 ** len(vs)


@pytest.mark.parametrize("vs, text", CORPUS, ids=IDS)
def test_fibre_parametrisation_hits_orbit(vs, text):
    A = atlas_of(vs, text)
    for s in exceptional_strata(A, exceptional_only=True):
        ch = A.charts[s.chart]
        Tc, Sc, B, K = fiber_parametrization(ch, s.zero_set, s.image_stratum)
        # the map from (base params, fibre coords) to the orbit is the identity on params
        for jj, j in enumerate(Sc):
            for ii, j2 in enumerate(Sc):
                img = sum(ch.rays[k][j] * B[kk][ii] for kk, k in enumerate(Tc))
                assert img == (1 if jj == ii else 0)
            for l in range(len(K[0]) if K else 0):
                assert sum(ch.rays[k][j] * K[kk][l] for kk, k in enumerate(Tc)) == 0
