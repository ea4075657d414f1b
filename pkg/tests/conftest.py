"""Shared fixtures and hypothesis strategies."""
import random

import pytest
from hypothesis import strategies as st

from ccclose.poly import LaurentPoly, Scalar, parse_ideal

XY = ("x", "y")
XYZ = ("x", "y", "z")

small_frac = st.fractions(min_value=-5, max_value=5, max_denominator=4)
scalars = st.builds(Scalar, small_frac, small_frac)
real_scalars = st.builds(Scalar, small_frac)


def laurent_polys(vars=XY, min_exp=-2, max_exp=3, max_terms=4, coeffs=scalars):
    exps = st.tuples(*[st.integers(min_exp, max_exp) for _ in vars])
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda d: LaurentPoly(vars, d))


def polys(vars=XY, max_exp=4, max_terms=4, coeffs=scalars):
    return laurent_polys(vars, 0, max_exp, max_terms, coeffs)


def random_poly(rng: random.Random, vars, max_deg=3, terms=3, lo=-3, hi=3):
    out = {}
    for _ in range(terms):
        e = [rng.randint(0, max_deg) for _ in vars]
        out[tuple(e)] = rng.randint(lo, hi)
    return LaurentPoly(vars, out)


@pytest.fixture
def cube_ideal():
    return parse_ideal("x^3,y^3", XY)


@pytest.fixture
def square_ideal():
    return parse_ideal("x^2,y^2", XY)


@pytest.fixture
def hochster_ideal():
    return parse_ideal("x^2,y^2,x*y*z", XYZ)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
