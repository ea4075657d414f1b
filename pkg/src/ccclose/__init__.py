"""Exact decision procedure for the continuous closure of monomial ideals."""

__version__ = "0.1.0"

from .poly import LaurentPoly, MonomialIdeal, Scalar, parse_ideal, parse_poly  # noqa: E402
from .closure import Verdict, closure_monomials, decide_membership  # noqa: E402

__all__ = [
    "LaurentPoly",
    "MonomialIdeal",
    "Scalar",
    "Verdict",
    "closure_monomials",
    "decide_membership",
    "parse_ideal",
    "parse_poly",
]
