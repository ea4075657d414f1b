"""Finite-determinacy tests.

* ``wronskian_test``: is ``phi`` a constant combination of ``funcs`` on a
  domain? A refutation is a point set where ``phi`` is not in the span of the
  evaluated ``funcs``, exhibited by a non-zero determinant.
* ``fiber_span_test``: the same question on the whole fibre of the blow-up
  over an X-orbit, with coefficients in the function field of the orbit.
* ``sci0_membership``: the fibre test over every orbit of ``V(I)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from . import linalg
from .descent import DescentProblem, fibre_over_orbit, section_rows
from .errors import PreconditionError
from .newton import blowup_charts, dot
from .poly import ONE, ZERO, LaurentPoly, MonomialIdeal, Scalar

DEFAULT_SEED = 20240607


# ------------------------------------------------------------------ results

@dataclass(frozen=True)
class WronskianCertificate:
    """Points where ``phi`` leaves the span of the evaluated functions.

    ``matrix`` has one row per selected function (then ``phi``) and one column
    per point; ``det_value`` is its determinant. ``full`` holds the values of
    all functions at the points, so that ``rank_F`` can be rechecked.
    """

    points: tuple
    matrix: tuple
    det_value: Scalar
    rows: tuple          # indices of the functions used in ``matrix``
    rank_F: int
    full: tuple          # all r functions at the points (rows = functions)
    seed: int
    context: dict = field(default_factory=dict, compare=False, hash=False)

    def recheck(self) -> bool:
        return _check_cert_numbers(self.matrix, self.det_value, self.full, self.rank_F)

    def to_json(self):
        doc = {
            "kind": "wronskian",
            "points": [_point_json(p) for p in self.points],
            "matrix": [[x.to_json() for x in row] for row in self.matrix],
            "det": self.det_value.to_json(),
            "rows": list(self.rows),
            "rank_F": self.rank_F,
            "full": [[x.to_json() for x in row] for row in self.full],
            "seed": self.seed,
        }
        doc.update(self.context)
        return doc


@dataclass(frozen=True)
class ValuationCertificate:
    """``g`` is not integral over ``I``: along ``x = c t^w`` it vanishes too slowly.

    ``order`` is the w-order of ``g`` and ``ideal_order`` the w-order of ``I``;
    ``point`` is where the w-initial form of ``g`` is non-zero.
    """

    weight: tuple
    order: int
    ideal_order: int
    point: tuple
    initial_value: Scalar
    context: dict = field(default_factory=dict, compare=False, hash=False)

    def to_json(self):
        doc = {
            "kind": "valuation",
            "weight": list(self.weight),
            "order": self.order,
            "ideal_order": self.ideal_order,
            "point": [Scalar.coerce(x).to_json() for x in self.point],
            "initial_value": self.initial_value.to_json(),
        }
        doc.update(self.context)
        return doc


@dataclass(frozen=True)
class SpanResult:
    status: str                       # "InSpan" | "NotInSpan"
    coeffs: tuple | None = None       # constants, or RationalFunction over the stratum
    certificate: object = None
    stratum: tuple = ()
    params: tuple = ()
    flagged: bool = False             # a pivot vanishes somewhere on the stratum
    seed: int = DEFAULT_SEED

    @property
    def in_span(self):
        return self.status == "InSpan"

    def summary(self):
        out = {"stratum": list(self.stratum), "result": self.status}
        if self.coeffs is not None:
            out["coeffs"] = [str(c) for c in self.coeffs]
        if self.flagged:
            out["flagged"] = True
        return out


# ------------------------------------------------------------------ domains

@dataclass(frozen=True)
class TorusDomain:
    """All points of ``(C*)^d`` in the given coordinates."""

    vars: tuple


@dataclass(frozen=True)
class PointDomain:
    """An explicit finite point set."""

    vars: tuple
    points: tuple


@dataclass(frozen=True)
class TableFunction:
    """A function on a finite set, given by its values; points are ``(index,)``."""

    values: tuple

    def evaluate(self, point):
        return Scalar.coerce(self.values[point[0]])


def _point_json(p):
    if isinstance(p, dict):
        return {k: ([Scalar.coerce(x).to_json() for x in v] if k == "coords" else v)
                for k, v in p.items()}
    return [Scalar.coerce(x).to_json() for x in p]


def _point_from_json(p):
    if isinstance(p, dict):
        return {k: (tuple(Scalar.from_json(x) for x in v) if k == "coords" else v)
                for k, v in p.items()}
    return tuple(Scalar.from_json(x) for x in p)


# ----------------------------------------------------------- point supplies

def integer_points(d, limit=None):
    """Points of ``{1,2,...}^d`` in order of increasing maximum entry."""
    if d == 0:
        yield ()
        return
    k = 1
    while limit is None or k <= limit:
        for p in product(range(1, k + 1), repeat=d):
            if max(p) == k:
                yield p
        k += 1


def random_points(d, rng, count):
    for _ in range(count):
        yield tuple(Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 5)) for _ in range(d))


# -------------------------------------------------------------- span solving

def _min_support_solve(A, b, ncols, exact):
    """Solve ``A c = b`` choosing the fewest non-zero entries, then lex-smallest support.

    ``exact`` selects Scalar elimination (True) or fraction-free elimination over
    Laurent polynomials (False). Returns ``(coeffs, pivots)`` or ``(None, None)``.
    """
    for size in range(ncols + 1):
        for sub in combinations(range(ncols), size):
            As = [[row[j] for j in sub] for row in A]
            if exact:
                if size and linalg.rank(As) != size:
                    continue
                sol = linalg.solve(As, b) if size else ([] if all(not x for x in b) else None)
                if sol is None:
                    continue
                out = [ZERO] * ncols
                for j, v in zip(sub, sol):
                    out[j] = v
                return out, []
            if size == 0:
                if all(not x for x in b):
                    return [None] * ncols, []
                continue
            if not As or linalg.ff_rank(As) != size:
                continue
            sol, piv = linalg.ff_solve_unique(As, b)
            if sol is None:
                continue
            out = [None] * ncols
            for j, v in zip(sub, sol):
                out[j] = v
            return out, piv
    return None, None


def _coefficient_system(func_rows, phi_rows, nparams):
    """Match coefficients in the fibre coordinates.

    ``func_rows[p]`` is a list of ``r`` Laurent polynomials on piece ``p``
    (variables = params + fibre coords); returns ``(A, b)`` with entries Laurent
    polynomials in the params only.
    """
    A, b = [], []
    for funcs, phi in zip(func_rows, phi_rows):
        vs = phi.vars
        pvars = vs[:nparams]
        r = len(funcs)
        buckets = {}
        for idx, p in enumerate(list(funcs) + [phi]):
            for e, c in p.terms.items():
                key = e[nparams:]
                buckets.setdefault(key, [dict() for _ in range(r + 1)])
                buckets[key][idx][e[:nparams]] = c
        for key in sorted(buckets):
            row = buckets[key]
            A.append([LaurentPoly(pvars, row[i]) for i in range(r)])
            b.append(LaurentPoly(pvars, row[r]))
    return A, b


# ---------------------------------------------------------- certificates

def _evaluate_columns(funcs, phi, point):
    return [f.evaluate(point) for f in funcs] + [phi.evaluate(point)]


def _greedy_certificate(columns_iter, r):
    """Collect points until ``phi`` leaves the span; return (points, values) or None.

    ``columns_iter`` yields ``(point, values)`` with ``values`` the r function
    values followed by phi's value.
    """
    chosen, vals = [], []
    for pt, v in columns_iter:
        trial = vals + [v]
        if linalg.rank(trial) > len(vals):
            chosen.append(pt)
            vals = trial
            rk_f = linalg.rank([row[:r] for row in vals])
            if linalg.rank(vals) > rk_f:
                return chosen, vals
            if len(vals) > r + 1:
                return None
    return None


def _make_certificate(points, vals, r, seed, context=None):
    k = linalg.rank([row[:r] for row in vals])
    # columns of F that are independent on these points, then phi
    fm = [[row[i] for row in vals] for i in range(r)]          # rows = functions
    sel = []
    for i in range(r):
        if linalg.rank([fm[j] for j in sel + [i]]) > len(sel):
            sel.append(i)
        if len(sel) == k:
            break
    phi_row = [row[r] for row in vals]
    M = [fm[i] for i in sel] + [phi_row]
    # choose k+1 points (columns) with a non-singular square
    cols = []
    for c in range(len(points)):
        if linalg.rank([[row[j] for j in cols + [c]] for row in M]) > len(cols):
            cols.append(c)
    sq = [[row[j] for j in cols] for row in M]
    pts = tuple(points[j] for j in cols)
    full = tuple(tuple(fm[i][j] for j in cols) for i in range(r))
    cert = WronskianCertificate(pts, tuple(tuple(row) for row in sq), linalg.det(sq),
                                tuple(sel), k, full, seed, dict(context or {}))
    assert cert.det_value and cert.recheck()
    return cert


def _check_cert_numbers(matrix, det_value, full, rank_F):
    if not det_value or linalg.det(matrix) != det_value:
        return False
    if len(matrix) != rank_F + 1 or any(len(row) != rank_F + 1 for row in matrix):
        return False
    if full and linalg.rank(full) > rank_F:
        return False
    return True


# ------------------------------------------------------------------ Wronskian

def wronskian_test(funcs, phi, domain, seed=DEFAULT_SEED, subset_limit=None) -> SpanResult:
    """Decide whether ``phi`` is a constant combination of ``funcs`` on ``domain``."""
    funcs = list(funcs)
    r = len(funcs)
    if isinstance(domain, PointDomain):
        return _wronskian_points(funcs, phi, domain, seed, subset_limit)
    if not isinstance(domain, TorusDomain):
        raise TypeError("domain must be a TorusDomain or PointDomain")
    vs = tuple(domain.vars)
    for p in funcs + [phi]:
        if p.vars != vs:
            raise PreconditionError("functions must live on the domain's coordinates")
    monos = sorted({e for p in funcs + [phi] for e in p.terms})
    A = [[Scalar.coerce(p.terms.get(m, ZERO)) for p in funcs] for m in monos]
    b = [phi.terms.get(m, ZERO) for m in monos]
    coeffs, _ = _min_support_solve(A, b, r, exact=True)
    if coeffs is not None:
        return SpanResult("InSpan", tuple(coeffs), None, seed=seed)
    rng = random.Random(seed)
    deg = max((abs(x) for p in funcs + [phi] for e in p.terms for x in e), default=0)

    def supply():
        for pt in integer_points(len(vs), limit=deg + r + 2):
            yield pt, _evaluate_columns(funcs, phi, pt)
        for pt in random_points(len(vs), rng, 200):
            if all(pt):
                yield pt, _evaluate_columns(funcs, phi, pt)

    found = _greedy_certificate(supply(), r)
    if found is None:
        raise AssertionError("no refuting point set found for an inconsistent system")
    cert = _make_certificate(found[0], found[1], r, seed)
    return SpanResult("NotInSpan", None, cert, seed=seed)


def _wronskian_points(funcs, phi, domain, seed, subset_limit):
    pts = list(domain.points)
    if not pts:
        raise PreconditionError("empty domain")
    r = len(funcs)
    vals = [_evaluate_columns(funcs, phi, p) for p in pts]
    limit = r + 1 if subset_limit is None else subset_limit
    for size in range(1, min(limit, len(pts)) + 1):
        for sub in combinations(range(len(pts)), size):
            sv = [vals[k] for k in sub]
            if linalg.rank(sv) > linalg.rank([row[:r] for row in sv]):
                found = _greedy_certificate(((pts[k], vals[k]) for k in sub), r)
                cert = _make_certificate(found[0], found[1], r, seed)
                return SpanResult("NotInSpan", None, cert, seed=seed)
    A = [row[:r] for row in vals]
    b = [row[r] for row in vals]
    coeffs, _ = _min_support_solve(A, b, r, exact=True)
    if coeffs is None:
        # only reachable with a subset limit below r+1
        return SpanResult("NotInSpan", None, None, seed=seed)
    return SpanResult("InSpan", tuple(coeffs), None, seed=seed)


def finite_fibre_test(D: DescentProblem, phi, base, seed=DEFAULT_SEED, subset_limit=None):
    """Span test over one base point of a finite model.

    ``phi[k]`` is the section at point ``k`` of the model (one Scalar per row
    of ``F``). Every (point, row) pair becomes one evaluation point.
    """
    fm = D.model
    fvals = [[] for _ in range(D.E_rank)]
    pvals = []
    for k in fm.fiber(base):
        for a, row in enumerate(fm.matrices[k]):
            for i in range(D.E_rank):
                fvals[i].append(row[i])
            pvals.append(Scalar.coerce(phi[k][a]))
    funcs = [TableFunction(tuple(v)) for v in fvals]
    domain = PointDomain(("k",), tuple((j,) for j in range(len(pvals))))
    return wronskian_test(funcs, TableFunction(tuple(pvals)), domain, seed, subset_limit)


def brute_force_in_span(funcs, phi, points) -> bool:
    """Rank comparison on the whole stacked evaluation matrix."""
    vals = [_evaluate_columns(funcs, phi, p) for p in points]
    r = len(funcs)
    return linalg.rank(vals) == linalg.rank([row[:r] for row in vals])


# ----------------------------------------------------------- valuations

def valuation_obstruction(atlas, g: LaurentPoly):
    """A weight along which ``g`` vanishes to lower order than ``I``, or None."""
    gens = atlas.generators
    rays = [atlas.fan.rays[i] for i in range(len(atlas.fan.rays))]
    for w in sorted(rays, key=lambda v: (sum(v), v)):
        ordI = min(dot(w, a) for a in gens)
        if not g:
            return None
        ordg = min(dot(w, e) for e in g.terms)
        if ordg < ordI:
            init = LaurentPoly(g.vars, {e: c for e, c in g.terms.items() if dot(w, e) == ordg})
            for pt in integer_points(len(g.vars)):
                v = init.evaluate(pt)
                if v:
                    return ValuationCertificate(tuple(w), ordg, ordI, tuple(pt), v)
    return None


def in_integral_closure(atlas, g) -> bool:
    return valuation_obstruction(atlas, g) is None


# ---------------------------------------------------------- fibre span test

def fiber_span_test(D: DescentProblem, g: LaurentPoly, S, seed=DEFAULT_SEED,
                    max_tries=40) -> SpanResult:
    """Constant-along-the-fibre coefficients for ``g`` over the X-orbit ``O_S``."""
    S = tuple(sorted(S))
    if D.atlas is None:
        raise PreconditionError("fibre tests need the blow-up atlas")
    atlas = D.atlas
    r = D.E_rank
    if not S or not all(any(a[j] > 0 for j in S) for a in atlas.generators):
        # off V(I) the fibre is one point and some f_i is a unit there
        return _off_VI_result(atlas, g, S, seed)
    F = fibre_over_orbit(D, S)
    pieces = F.model.pieces
    params = pieces[0].params if pieces else ()
    g_rows = section_rows(F, g)
    func_rows = [pc.f_rows[0] for pc in pieces]
    phi_rows = [row[0] for row in g_rows]
    A, b = _coefficient_system(func_rows, phi_rows, len(params))
    if params:
        coeffs, piv = _min_support_solve(A, b, r, exact=False)
        if coeffs is not None:
            zero = LaurentPoly.zero(params)
            out = tuple(linalg.RationalFunction.of(zero) if c is None else c for c in coeffs)
            flagged = any(not p.is_monomial() for p in piv)
            return SpanResult("InSpan", out, None, S, params, flagged, seed)
    else:
        As = [[x.constant_term() for x in row] for row in A]
        bs = [x.constant_term() for x in b]
        coeffs, _ = _min_support_solve(As, bs, r, exact=True)
        if coeffs is not None:
            return SpanResult("InSpan", tuple(coeffs), None, S, params, False, seed)
    cert = _fibre_certificate(atlas, F, g, S, seed, max_tries)
    return SpanResult("NotInSpan", None, cert, S, params, False, seed)


def _off_VI_result(atlas, g, S, seed):
    n = len(atlas.vars)
    for i, a in enumerate(atlas.generators):
        if all(a[j] == 0 for j in S):
            # f_i is a unit on O_S: c_i = g / f_i, everything else zero
            params = tuple(atlas.vars[j] for j in range(n) if j not in S)
            keep = [j for j in range(n) if j not in S]
            gr = g.restrict_zero(list(S)).drop_vars(keep) if S else g
            q = gr.shift(tuple(-a[j] for j in keep)).scale(ONE / atlas.coefficients[i])
            out = [linalg.RationalFunction.of(LaurentPoly.zero(params))] * len(atlas.generators)
            out[i] = linalg.RationalFunction.of(q)
            return SpanResult("InSpan", tuple(out), None, S, params, False, seed)
    raise PreconditionError(f"orbit {S} lies in V(I)")


def _fibre_certificate(atlas, F, g, S, seed, max_tries):
    """Specialise the base parameters and find refuting fibre points."""
    pieces = F.model.pieces
    params = pieces[0].params if pieces else ()
    r = len(atlas.generators)
    rng = random.Random(seed)
    g_rows = section_rows(F, g)
    candidates = [tuple(1 for _ in params)]
    candidates += [tuple(Fraction(rng.randint(1, 9), rng.randint(1, 4)) * rng.choice([1, -1])
                         for _ in params) for _ in range(max_tries)]
    for x0 in candidates:
        found = _fibre_points(atlas, pieces, g_rows, x0, r, rng)
        if found is not None:
            points, vals = found
            return _make_certificate(points, vals, r, seed,
                                     {"stratum": list(S),
                                      "base_params": [Scalar.coerce(x).to_json() for x in x0]})
    raise AssertionError("could not specialise the parameters to a refuting fibre")


def _fibre_points(atlas, pieces, g_rows, x0, r, rng):

    def piece_supply(idx, limit):
        pc = pieces[idx]
        funcs = pc.f_rows[0]
        phi = g_rows[idx][0]
        imgs = pc.source_images[0]
        deg = max((abs(x) for p in list(funcs) + [phi] for e in p.terms for x in e), default=0)
        for t in integer_points(len(pc.coords), limit=limit if limit else deg + r + 2):
            pt = tuple(x0) + t
            u = tuple(x.evaluate(pt) for x in imgs)
            yield {"chart": pc.chart[0], "coords": u}, _evaluate_columns(funcs, phi, pt)

    # one piece alone often suffices; fall back to the whole fibre
    for idx in range(len(pieces)):
        found = _greedy_certificate(piece_supply(idx, None), r)
        if found is not None:
            return found

    def all_supply():
        gens = [piece_supply(i, None) for i in range(len(pieces))]
        while gens:
            nxt = []
            for gen in gens:
                item = next(gen, None)
                if item is not None:
                    yield item
                    nxt.append(gen)
            gens = nxt

    return _greedy_certificate(all_supply(), r)


# ------------------------------------------------------------ Sci0 membership

@dataclass
class Sci0Report:
    member: bool
    results: list
    obstruction: object = None

    def summary(self):
        return {"member": self.member, "strata": [r.summary() for r in self.results]}


def orbit_order(I: MonomialIdeal):
    """Orbits of V(I), deepest (smallest orbit) first."""
    return sorted(I.vanishing_supports(), key=lambda S: (-len(S), S))


def sci0_membership(D: DescentProblem, g: LaurentPoly, seed=DEFAULT_SEED) -> Sci0Report:
    """Fibre span tests over every orbit of ``V(I)``."""
    if not g.is_polynomial():
        raise PreconditionError("g must be a polynomial")
    atlas = D.atlas
    obs = valuation_obstruction(atlas, g)
    if obs is not None:
        return Sci0Report(False, [], obs)
    results = [fiber_span_test(D, g, S, seed) for S in orbit_order(atlas.ideal)]
    return Sci0Report(all(r.in_span for r in results), results)


# --------------------------------------------------------- verification

def certificate_from_json(doc):
    kind = doc.get("kind")
    if kind == "wronskian":
        ctx = {k: v for k, v in doc.items()
               if k not in ("kind", "points", "matrix", "det", "rows", "rank_F", "full", "seed")}
        return WronskianCertificate(
            tuple(_point_from_json(p) for p in doc["points"]),
            tuple(tuple(Scalar.from_json(x) for x in row) for row in doc["matrix"]),
            Scalar.from_json(doc["det"]), tuple(doc["rows"]), int(doc["rank_F"]),
            tuple(tuple(Scalar.from_json(x) for x in row) for row in doc["full"]),
            int(doc["seed"]), ctx)
    if kind == "valuation":
        ctx = {k: v for k, v in doc.items()
               if k not in ("kind", "weight", "order", "ideal_order", "point", "initial_value")}
        return ValuationCertificate(tuple(doc["weight"]), int(doc["order"]),
                                    int(doc["ideal_order"]),
                                    tuple(Scalar.from_json(x) for x in doc["point"]),
                                    Scalar.from_json(doc["initial_value"]), ctx)
    raise ValueError(f"unknown certificate kind {kind!r}")


def verify_wronskian(cert: WronskianCertificate, I: MonomialIdeal, phi: LaurentPoly,
                     generators=None, coefficients=None) -> bool:
    """Recompute a fibre certificate from the ideal, ``phi`` and the chart points."""
    if not _check_cert_numbers(cert.matrix, cert.det_value, cert.full, cert.rank_F):
        return False
    atlas = blowup_charts(I, generators, coefficients)
    r = atlas.rank
    base = None
    cols = []
    for p in cert.points:
        ch = atlas.charts[p["chart"]]
        u = tuple(p["coords"])
        bp = ch.base_point(u)
        if base is None:
            base = bp
        elif bp != base:
            return False
        ge = ch.chart_expression(phi)
        cols.append([f.evaluate(u) for f in ch.f_tilde] + [ge.evaluate(u)])
    n = len(I.vars)
    if base is None or not all(any(a[j] > 0 and not base[j] for j in range(n))
                               for a in atlas.generators):
        return False
    full = tuple(tuple(col[i] for col in cols) for i in range(r))
    if full != tuple(tuple(row) for row in cert.full):
        return False
    M = [[col[i] for col in cols] for i in cert.rows] + [[col[r] for col in cols]]
    return tuple(tuple(row) for row in M) == tuple(tuple(row) for row in cert.matrix)


def verify_wronskian_points(cert: WronskianCertificate, funcs, phi) -> bool:
    """Recompute a certificate whose points are plain coordinate tuples."""
    if not _check_cert_numbers(cert.matrix, cert.det_value, cert.full, cert.rank_F):
        return False
    cols = [_evaluate_columns(funcs, phi, p) for p in cert.points]
    r = len(funcs)
    full = tuple(tuple(col[i] for col in cols) for i in range(r))
    M = [[col[i] for col in cols] for i in cert.rows] + [[col[r] for col in cols]]
    return full == cert.full and tuple(tuple(row) for row in M) == cert.matrix


def verify_valuation(cert: ValuationCertificate, I: MonomialIdeal, g: LaurentPoly,
                     generators=None) -> bool:
    gens = list(generators) if generators is not None else list(I.gens)
    w = cert.weight
    if any(x < 0 for x in w) or not any(w) or not g:
        return False
    ordI = min(dot(w, a) for a in gens)
    ordg = min(dot(w, e) for e in g.terms)
    if ordI != cert.ideal_order or ordg != cert.order or ordg >= ordI:
        return False
    if any(not Scalar.coerce(x) for x in cert.point):
        return False
    init = LaurentPoly(g.vars, {e: c for e, c in g.terms.items() if dot(w, e) == ordg})
    v = init.evaluate(cert.point)
    return bool(v) and v == cert.initial_value
