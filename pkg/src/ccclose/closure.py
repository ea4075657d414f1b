"""Deciding ``g in I^C`` for a monomial ideal ``I``.

Outline of ``decide_membership``:

1. If every term of ``g`` lies in ``I`` the answer is algebraic.
2. If ``g`` is not integral over ``I`` a weight vector refutes it.
3. Otherwise walk the orbits of ``V(I)`` deepest first. On each orbit solve
   for coefficients constant along the fibres of the blow-up. A failure is a
   pointwise obstruction, certified by a Wronskian determinant. A success
   with polynomial coefficients is subtracted from ``g``.
4. Once the remainder vanishes on the whole preimage of ``V(I)`` the
   canonical witness for the remainder is continuous, so ``g`` is a member.

Coefficients that are not polynomial on their orbit cannot be lifted to a
continuous solution by this procedure; if no obstruction turns up the
verdict is ``Undetermined``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

from . import __version__
from .descent import (DescentProblem, fiber_product_maps, fibre_over_orbit, from_ideal,
                      restrict, scion_diagonal, scion_factor, section_rows)
from .errors import DimensionCapError, PreconditionError, VariableMismatchError
from .findet import (DEFAULT_SEED, WronskianCertificate,
                     certificate_from_json, fiber_span_test, orbit_order, valuation_obstruction,
                     verify_valuation, verify_wronskian)
from .linalg import RationalFunction
from .poly import MAX_VARS, ONE, LaurentPoly, MonomialIdeal, Scalar, grlex_key, parse_poly
from .witness import (Witness, algebraic_witness, canonical_witness, structurally_continuous,
                      vanishes_on_exceptional)

IN = "InClosure"
OUT = "NotInClosure"
UNDETERMINED = "Undetermined"
MAX_TABULATION_DEGREE = 12


@dataclass
class Verdict:
    status: str
    ideal: MonomialIdeal
    g: LaurentPoly
    certificate: object = None        # certificate, Witness, or explanation string
    trace: list = field(default_factory=list)
    seed: int = DEFAULT_SEED
    generators: tuple = ()
    coefficients: tuple = ()
    multipliers: tuple = ()           # h_i with g - sum h_i f_i = remainder
    remainder: LaurentPoly | None = None

    @property
    def witness(self):
        return self.certificate if isinstance(self.certificate, Witness) else None

    def to_json(self):
        vs = list(self.ideal.vars)
        doc = {
            "status": self.status,
            "vars": vs,
            "ideal": str(self.ideal),
            "generators": [list(a) for a in self.generators],
            "coefficients": [Scalar.coerce(c).to_json() for c in self.coefficients],
            "candidate": str(self.g),
        }
        if self.status == OUT:
            cert = self.certificate.to_json()
            cert["multipliers"] = [str(h) for h in self.multipliers]
            cert["remainder"] = str(self.remainder)
            doc["certificate"] = cert
        elif self.status == IN:
            doc["witness"] = self.certificate.to_json()
        else:
            doc["explanation"] = str(self.certificate)
        doc["trace"] = self.trace
        doc["seed"] = self.seed
        doc["version"] = __version__
        return doc

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class RelativeProblem:
    D: DescentProblem
    Z: tuple                     # supports of orbit closures
    vanishing: bool


# ------------------------------------------------------------------ helpers

def _check_inputs(I: MonomialIdeal, g: LaurentPoly):
    if I.nvars > MAX_VARS:
        raise DimensionCapError(f"at most {MAX_VARS} variables are supported")
    if g.vars != I.vars:
        raise VariableMismatchError(f"candidate variables {g.vars} differ from {I.vars}")
    if not g.is_polynomial():
        raise PreconditionError("the candidate must be a polynomial")


def _split_in_ideal(g: LaurentPoly, gens, coeffs, vars):
    """Move the terms of ``g`` lying in ``(gens)`` into multipliers.

    Returns ``(h, rest)`` with ``g = sum h_i f_i + rest``.
    """
    h = [dict() for _ in gens]
    rest = {}
    for e, c in g.terms.items():
        for i, a in enumerate(gens):
            if all(x >= y for x, y in zip(e, a)):
                q = tuple(x - y for x, y in zip(e, a))
                h[i][q] = h[i].get(q, Scalar(0)) + c / Scalar.coerce(coeffs[i])
                break
        else:
            rest[e] = c
    return [LaurentPoly(vars, t) for t in h], LaurentPoly(vars, rest)


def _lift_coefficient(c, vars, S):
    """Polynomial on X extending an orbit coefficient constantly across ``S``.

    Returns ``None`` when the coefficient has a pole on the orbit closure.
    """
    if isinstance(c, RationalFunction):
        q = c.laurent()
        if q is None or not q.is_polynomial():
            return None
        keep = [j for j in range(len(vars)) if j not in S]
        return q.embed(vars, keep)
    return LaurentPoly.const(vars, Scalar.coerce(c))


def _generator_polys(atlas):
    return [LaurentPoly.monomial(atlas.vars, a, c)
            for a, c in zip(atlas.generators, atlas.coefficients)]


# ---------------------------------------------------------------- decision

def decide_membership(I: MonomialIdeal, g: LaurentPoly, generators=None, coefficients=None,
                      seed=DEFAULT_SEED, max_depth=4) -> Verdict:
    """Decide ``g in I^C`` with a certificate or a witness."""
    _check_inputs(I, g)
    D = from_ideal(I, generators, coefficients)
    atlas = D.atlas
    gens, coeffs = atlas.generators, atlas.coefficients
    fs = _generator_polys(atlas)
    vs = I.vars
    trace = []
    common = dict(ideal=I, g=g, seed=seed, generators=gens, coefficients=coeffs)

    h, rest = _split_in_ideal(g, gens, coeffs, vs)
    if not rest:
        trace.append({"step": "algebraic", "result": "g in I"})
        W = algebraic_witness(I, g, h, gens, coeffs)
        return Verdict(IN, certificate=W, trace=trace, multipliers=tuple(h), remainder=rest,
                       **common)

    obs = valuation_obstruction(atlas, g)
    if obs is not None:
        trace.append({"step": "valuation", "weight": list(obs.weight),
                      "order": obs.order, "ideal_order": obs.ideal_order})
        zero = tuple(LaurentPoly.zero(vs) for _ in gens)
        return Verdict(OUT, certificate=obs, trace=trace, multipliers=zero, remainder=g, **common)

    rem = rest
    blocked = []
    for depth in range(1, max_depth + 1):
        # terms already handled: members of I go to h, terms vanishing on E stay
        h2, rem = _split_in_ideal(rem, gens, coeffs, vs)
        h = [a + b for a, b in zip(h, h2)]
        if vanishes_on_exceptional(I, rem, gens):
            trace.append({"step": "final", "pass": depth, "result": "remainder vanishes on E"})
            W = canonical_witness(I, g, h, gens, coeffs)
            return Verdict(IN, certificate=W, trace=trace, multipliers=tuple(h), remainder=rem,
                           **common)
        changed = False
        blocked = []
        for S in orbit_order(I):
            res = fiber_span_test(D, rem, S, seed)
            entry = res.summary()
            entry["pass"] = depth
            trace.append(entry)
            if not res.in_span:
                cert = res.certificate
                cert.context.update({"vars": list(vs), "ideal": str(I),
                                     "generators": [list(a) for a in gens],
                                     "coefficients": [c.to_json() for c in coeffs]})
                return Verdict(OUT, certificate=cert, trace=trace, multipliers=tuple(h),
                               remainder=rem, **common)
            if res.flagged:
                blocked.append((S, "a pivot of the parametric solve vanishes on the orbit"))
                continue
            lifted = [_lift_coefficient(c, vs, S) for c in res.coeffs]
            if any(x is None for x in lifted):
                blocked.append((S, "coefficients have a pole on the orbit closure: "
                                   + ", ".join(str(c) for c in res.coeffs)))
                continue
            if all(not x for x in lifted):
                continue
            sub = LaurentPoly.zero(vs)
            for x, f in zip(lifted, fs):
                sub = sub + x * f
            rem = rem - sub
            h = [a + b for a, b in zip(h, lifted)]
            changed = True
        if blocked:
            break
        if not changed:
            break
    h2, rem = _split_in_ideal(rem, gens, coeffs, vs)
    h = [a + b for a, b in zip(h, h2)]
    if not blocked and vanishes_on_exceptional(I, rem, gens):
        trace.append({"step": "final", "result": "remainder vanishes on E"})
        W = canonical_witness(I, g, h, gens, coeffs)
        return Verdict(IN, certificate=W, trace=trace, multipliers=tuple(h), remainder=rem,
                       **common)
    if blocked:
        why = "; ".join(f"orbit {list(S)}: {msg}" for S, msg in blocked)
    else:
        why = f"recursion cap {max_depth} reached"
    trace.append({"step": "undetermined", "reason": why})
    return Verdict(UNDETERMINED, certificate=why, trace=trace, multipliers=tuple(h),
                   remainder=rem, **common)


# ---------------------------------------------------------------- relative

def relative_problem(D: DescentProblem, Z, g: LaurentPoly) -> RelativeProblem:
    """Package ``D`` with ``Z`` and check symbolically that ``g~`` vanishes over ``Z``."""
    R = restrict(D, Z)
    vanishing = all(not x for row in section_rows(R, g) for x in row)
    return RelativeProblem(D, tuple(tuple(S) for S in Z), vanishing)


def relative_membership(RP: RelativeProblem, g: LaurentPoly, seed=DEFAULT_SEED) -> Verdict:
    """Membership for a ``g`` whose chart expression vanishes over ``Z``."""
    if not RP.vanishing:
        raise PreconditionError("g~ does not vanish on the preimage of Z")
    D = RP.D
    atlas = D.atlas
    I = atlas.ideal
    gens, coeffs = atlas.generators, atlas.coefficients
    common = dict(ideal=I, g=g, seed=seed, generators=gens, coefficients=coeffs)
    zero = tuple(LaurentPoly.zero(I.vars) for _ in gens)
    if not g:
        W = algebraic_witness(I, g, zero, gens, coeffs)
        return Verdict(IN, certificate=W, trace=[{"step": "relative", "result": "zero"}],
                       multipliers=zero, remainder=g, **common)
    outside = [S for S in orbit_order(I) if not any(set(z) <= set(S) for z in RP.Z)]
    trace = []
    for S in outside:
        res = fiber_span_test(D, g, S, seed)
        trace.append(res.summary())
        if not res.in_span:
            cert = res.certificate
            cert.context.update({"vars": list(I.vars), "ideal": str(I),
                                 "generators": [list(a) for a in gens],
                                 "coefficients": [c.to_json() for c in coeffs]})
            return Verdict(OUT, certificate=cert, trace=trace, multipliers=zero, remainder=g,
                           **common)
    # off Z the map f has rank one, and over Z the section vanishes already
    if vanishes_on_exceptional(I, g, gens):
        trace.append({"step": "relative", "result": "vanishes on E"})
        W = canonical_witness(I, g, None, gens, coeffs)
        return Verdict(IN, certificate=W, trace=trace, multipliers=zero, remainder=g, **common)
    v = decide_membership(I, g, gens, coeffs, seed)
    v.trace = trace + v.trace
    return v


# -------------------------------------------------------------- tabulation

def monomials_up_to(n, bound):
    out = [e for e in product(range(bound + 1), repeat=n) if sum(e) <= bound]
    return sorted(out, key=grlex_key)


def closure_monomials(I: MonomialIdeal, degree_bound: int, seed=DEFAULT_SEED):
    """Monomials of degree at most ``degree_bound`` decided to lie in ``I^C``."""
    if degree_bound > MAX_TABULATION_DEGREE or degree_bound < 0:
        raise PreconditionError(f"degree bound must be between 0 and {MAX_TABULATION_DEGREE}")
    out = []
    for e in monomials_up_to(I.nvars, degree_bound):
        v = decide_membership(I, LaurentPoly.monomial(I.vars, e), seed=seed)
        if v.status == IN:
            out.append(e)
    return out


def tabulate(I: MonomialIdeal, degree_bound: int, seed=DEFAULT_SEED):
    if degree_bound > MAX_TABULATION_DEGREE or degree_bound < 0:
        raise PreconditionError(f"degree bound must be between 0 and {MAX_TABULATION_DEGREE}")
    rows = []
    for e in monomials_up_to(I.nvars, degree_bound):
        v = decide_membership(I, LaurentPoly.monomial(I.vars, e), seed=seed)
        rows.append((e, v.status))
    return rows


# --------------------------------------------------------------- fd scion

def build_fd_scion(D: DescentProblem) -> DescentProblem:
    """Scion on which pointwise tests over a point base decide membership.

    Restricts to the deepest orbit of ``V(I)``, takes the ``(r+1)``-fold fibre
    product with the stacked map, and factors through ``F`` itself with a rank
    witness. Rank-one problems are returned unchanged.
    """
    if D.E_rank == 1 or D.atlas is None:
        return D
    I = D.atlas.ideal
    orbits = orbit_order(I)
    if not orbits:
        return D
    S = orbits[0]
    # step 2 witness: some f~_i is a non-zero constant on every chart
    for pc in D.model.pieces:
        if not any(x.is_constant() and x for x in pc.f_rows[0]):
            raise PreconditionError(f"f is not surjective onto O(-E) on {pc.label}")
    F = fibre_over_orbit(D, S)
    maps = fiber_product_maps(F, D.E_rank + 1)
    Dg = scion_diagonal(F, maps)
    k = Dg.F_rank
    emb = []
    for pc in Dg.model.pieces:
        vs = pc.vars
        emb.append(tuple(tuple(LaurentPoly.const(vs, int(a == b)) for b in range(k))
                         for a in range(k)))
    return scion_factor(Dg, emb, 0)


# --------------------------------------------------------------- verifying

def verify_verdict_document(doc) -> tuple[bool, str]:
    """Re-check a serialised verdict from the document alone."""
    vs = tuple(doc["vars"])
    gens = [tuple(a) for a in doc["generators"]]
    coeffs = [Scalar.from_json(c) for c in doc.get("coefficients", [])] or [ONE] * len(gens)
    I = MonomialIdeal(vs, gens)
    g = parse_poly(doc["candidate"], vs)
    status = doc["status"]
    if status == OUT:
        cert_doc = doc["certificate"]
        hs = [parse_poly(s, vs) for s in cert_doc.get("multipliers", [])]
        rem = parse_poly(cert_doc["remainder"], vs)
        chk = g
        for h, a, c in zip(hs, gens, coeffs):
            chk = chk - h * LaurentPoly.monomial(vs, a, c)
        if chk != rem or any(not h.is_polynomial() for h in hs):
            return False, "multipliers do not reproduce the remainder"
        cert = certificate_from_json(cert_doc)
        if isinstance(cert, WronskianCertificate):
            ok = verify_wronskian(cert, I, rem, gens, coeffs)
        else:
            ok = verify_valuation(cert, I, rem, gens)
        return ok, "certificate recomputed" if ok else "certificate does not recompute"
    if status == IN:
        W = Witness.from_json(doc["witness"])
        fs = tuple(LaurentPoly.monomial(vs, a, c) for a, c in zip(gens, coeffs))
        if W.generators != fs or W.g != g:
            return False, "witness is for a different problem"
        if not W.identity_holds():
            return False, "cleared identity fails"
        if not structurally_continuous(W, I, gens):
            return False, "witness is not of the certified continuous form"
        return True, "identity cleared exactly; remainder vanishes on the exceptional locus"
    if status == UNDETERMINED:
        return True, "no certificate to check"
    return False, f"unknown status {status!r}"
