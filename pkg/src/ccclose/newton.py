"""Toric model of the blow-up of a monomial ideal.

The Newton polyhedron of ``I`` is ``conv(gens) + R^n_+``. Its normal fan,
refined to a smooth fan by stellar subdivisions, gives the affine charts of
the (normalised) blow-up: a cone with rays ``w_1..w_n`` is the chart
``x_j = prod_k u_k^{w_k[j]}``. On that chart the pulled-back ideal is
principal, generated by ``u^{W a}`` for the vertex ``a`` selected by the cone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .errors import DimensionCapError, ZeroIdealError
from .poly import MAX_VARS, LaurentPoly, MonomialIdeal, grlex_key


# ------------------------------------------------------------ integer helpers

def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def primitive(v):
    g = 0
    for x in v:
        g = math.gcd(g, abs(int(x)))
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(int(x) // g for x in v)


def int_det(rows):
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * int_det(minor)
    return total


def frac_inverse(rows):
    n = len(rows)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [r[n:] for r in m]


def unimodular_inverse(rows):
    inv = frac_inverse(rows)
    if any(x.denominator != 1 for r in inv for x in r):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in r] for r in inv]


def coords_in_cone(rays, v):
    """Coefficients of ``v`` in the basis ``rays`` (rows), as Fractions."""
    n = len(rays)
    inv = frac_inverse([list(r) for r in rays])
    # v = lam @ R  ->  lam = v @ R^{-1}
    return [sum(Fraction(v[j]) * inv[j][k] for j in range(n)) for k in range(n)]


def generalized_cross(rows, n):
    """A vector orthogonal to ``n-1`` vectors in Z^n (cofactor expansion)."""
    out = []
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows]
        out.append((-1) ** j * int_det([list(m) for m in minor]))
    return tuple(out)


# ------------------------------------------------------------------ types

@dataclass(frozen=True)
class NewtonPolyhedron:
    dim: int
    vertices: tuple
    generators: tuple

    def order(self, w):
        """``min <w, a>`` over the polyhedron (recession cone is the orthant)."""
        return min(dot(w, a) for a in self.generators)

    def minimizers(self, w):
        m = self.order(w)
        return [a for a in self.generators if dot(w, a) == m]


@dataclass(frozen=True)
class Fan:
    rays: tuple
    max_cones: tuple  # tuples of ray indices, position k replaces e_k

    def cone_rays(self, idx):
        return [self.rays[i] for i in self.max_cones[idx]]

    def contains(self, idx, v):
        lam = coords_in_cone(self.cone_rays(idx), v)
        return all(x >= 0 for x in lam)


@dataclass(frozen=True)
class Chart:
    index: int
    cone: tuple
    coords: tuple
    rays: tuple               # rays[k] is the exponent column of u_k
    e_generator: tuple        # vertex a_sigma
    e_exponent: tuple         # W a_sigma: O(-E) = u^{e_exponent}
    f_tilde: tuple            # LaurentPoly in coords, one per generator
    generators: tuple

    def map_to_X(self, vars):
        """The n monomials x_j(u)."""
        return [LaurentPoly.monomial(self.coords, tuple(r[j] for r in self.rays))
                for j in range(len(vars))]

    def pullback(self, p: LaurentPoly) -> LaurentPoly:
        return p.pullback(self.coords, self.rays)

    def chart_expression(self, p: LaurentPoly) -> LaurentPoly:
        """``p∘map / u^{W a_sigma}``; regular iff ``p`` lies in the integral closure here."""
        return self.pullback(p).shift(tuple(-e for e in self.e_exponent))

    def image_support(self, zero_set):
        n = len(self.rays[0])
        return tuple(j for j in range(n) if any(self.rays[k][j] > 0 for k in zero_set))

    def base_point(self, u):
        """Image in X of a chart point (exact)."""
        from .poly import Scalar
        n = len(self.rays[0])
        out = []
        for j in range(n):
            v = Scalar(1)
            for k, uk in enumerate(u):
                e = self.rays[k][j]
                if e:
                    v = v * Scalar.coerce(uk) ** e
            out.append(v)
        return tuple(out)


@dataclass(frozen=True)
class ChartAtlas:
    ideal: MonomialIdeal
    generators: tuple          # exponent vectors of f_1..f_r (may repeat)
    coefficients: tuple        # Scalar coefficient of each f_i
    polyhedron: NewtonPolyhedron
    fan: Fan
    charts: tuple

    @property
    def vars(self):
        return self.ideal.vars

    @property
    def rank(self):
        return len(self.generators)

    def transition(self, src: int, dst: int):
        """Exponent matrix N with ``u^dst_l = prod_k (u^src_k)^{N[k][l]}``."""
        W = [list(r) for r in self.charts[src].rays]
        Wd = [list(r) for r in self.charts[dst].rays]
        Wd_inv = unimodular_inverse(Wd)
        n = len(W)
        # log u_dst = Wd^{-T} W^T log u_src ; entry [l][k]
        M = [[sum(Wd_inv[j][l] * W[k][j] for j in range(n)) for k in range(n)] for l in range(n)]
        return [[M[l][k] for l in range(n)] for k in range(n)]

    def transition_monomial(self, src: int, dst: int):
        """f~_dst ∘ t = f~_src * u^{W_src (a_src - a_dst)}."""
        c_src, c_dst = self.charts[src], self.charts[dst]
        diff = tuple(a - b for a, b in zip(c_src.e_generator, c_dst.e_generator))
        return tuple(dot(r, diff) for r in c_src.rays)


@dataclass(frozen=True)
class Stratum:
    chart: int
    zero_set: tuple
    torus_coords: tuple
    image_stratum: tuple      # zero set S of the X-orbit it maps onto
    exceptional: bool

    @property
    def fiber_dim(self):
        return len(self.image_stratum) - len(self.zero_set)


# ---------------------------------------------------------- construction

def _check_ideal(I: MonomialIdeal):
    if not I.gens:
        raise ZeroIdealError("zero ideal")
    if I.nvars > MAX_VARS:
        raise DimensionCapError(f"at most {MAX_VARS} variables are supported")


def _normal_fan_rays(gens, n):
    """Rays of the normal fan of conv(gens) + R^n_+ other than the e_j."""
    if n == 1:
        return []
    hyper = [tuple(int(j == k) for k in range(n)) for j in range(n)]
    for a, b in combinations(gens, 2):
        d = tuple(x - y for x, y in zip(a, b))
        if any(d):
            hyper.append(d)
    cands = set()
    for rows in combinations(hyper, n - 1):
        v = generalized_cross([list(r) for r in rows], n)
        if not any(v):
            continue
        if all(x <= 0 for x in v):
            v = tuple(-x for x in v)
        if any(x < 0 for x in v):
            continue
        cands.add(primitive(v))
    P = NewtonPolyhedron(n, (), tuple(gens))
    out = []
    for w in cands:
        active = [tuple(int(j == k) for k in range(n)) for j in range(n) if w[j] == 0]
        mins = P.minimizers(w)
        active += [tuple(x - y for x, y in zip(a, mins[0])) for a in mins[1:]]
        if _int_rank(active) == n - 1:
            out.append(w)
    units = {tuple(int(j == k) for k in range(n)) for j in range(n)}
    return sorted((w for w in out if w not in units), key=grlex_key)


def _int_rank(rows):
    if not rows:
        return 0
    m = [[Fraction(x) for x in r] for r in rows]
    rk = 0
    ncols = len(m[0])
    for c in range(ncols):
        piv = next((i for i in range(rk, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        for i in range(rk + 1, len(m)):
            f = m[i][c] / m[rk][c]
            m[i] = [a - f * b for a, b in zip(m[i], m[rk])]
        rk += 1
    return rk


class _FanBuilder:
    def __init__(self, n):
        self.n = n
        self.rays = [tuple(int(j == k) for k in range(n)) for j in range(n)]
        self.cones = [tuple(range(n))]

    def insert(self, w):
        w = primitive(w)
        if w in self.rays:
            return False
        self.rays.append(w)
        idx = len(self.rays) - 1
        new = []
        changed = False
        for cone in self.cones:
            lam = coords_in_cone([self.rays[i] for i in cone], w)
            if all(x >= 0 for x in lam):
                changed = True
                for k, x in enumerate(lam):
                    if x > 0:
                        c = list(cone)
                        c[k] = idx
                        new.append(tuple(c))
            else:
                new.append(cone)
        self.cones = new
        return changed


def _split_ray(P, rays):
    """A ray at which the vertex selector changes along some edge, or None."""
    sel = [P.minimizers(r) for r in rays]
    common = set(sel[0])
    for s in sel[1:]:
        common &= set(s)
    if common:
        return None
    for i, j in combinations(range(len(rays)), 2):
        if set(sel[i]) & set(sel[j]):
            continue
        ra, rb = rays[i], rays[j]
        va, vb = sel[i][0], sel[j][0]
        d = tuple(x - y for x, y in zip(va, vb))
        alpha = dot(rb, d)
        beta = -dot(ra, d)
        w = tuple(alpha * x + beta * y for x, y in zip(ra, rb))
        if any(w) and all(x >= 0 for x in w):
            return primitive(w)
    # selector linear on every edge but not on the cone: use the barycentre
    return primitive(tuple(sum(col) for col in zip(*rays)))


def _parallelepiped_point(rays):
    n = len(rays)
    bounds = [sum(max(r[j], 0) for r in rays) for j in range(n)]
    best = None
    for p in product(*[range(b + 1) for b in bounds]):
        if not any(p):
            continue
        lam = coords_in_cone(rays, p)
        if all(0 <= x < 1 for x in lam):
            key = grlex_key(p)
            if best is None or key < grlex_key(best):
                best = p
    return primitive(best) if best is not None else None


def newton_polyhedron(I: MonomialIdeal) -> NewtonPolyhedron:
    _check_ideal(I)
    fan = normal_fan(NewtonPolyhedron(I.nvars, (), I.gens))
    P = NewtonPolyhedron(I.nvars, (), I.gens)
    verts = []
    for idx in range(len(fan.max_cones)):
        v = _cone_vertex(P, fan.cone_rays(idx))
        if v not in verts:
            verts.append(v)
    verts = [g for g in I.gens if g in verts]
    return NewtonPolyhedron(I.nvars, tuple(verts), I.gens)


def _cone_vertex(P, rays):
    common = set(P.minimizers(rays[0]))
    for r in rays[1:]:
        common &= set(P.minimizers(r))
    if len(common) != 1:
        raise AssertionError("cone is not inside a single maximal normal cone")
    return next(iter(common))


def normal_fan(P: NewtonPolyhedron) -> Fan:
    """Smooth refinement of the normal fan, built by stellar subdivisions."""
    n = P.dim
    fb = _FanBuilder(n)
    for w in _normal_fan_rays(P.generators, n):
        fb.insert(w)
    # refine until every cone selects a single vertex
    while True:
        for cone in fb.cones:
            w = _split_ray(P, [fb.rays[i] for i in cone])
            if w is not None and w not in fb.rays:
                fb.insert(w)
                break
        else:
            break
    # resolve to unimodular cones
    while True:
        for cone in fb.cones:
            R = [fb.rays[i] for i in cone]
            if abs(int_det([list(r) for r in R])) > 1:
                fb.insert(_parallelepiped_point(R))
                break
        else:
            break
    return Fan(tuple(fb.rays), tuple(fb.cones))


def chart_coords(n, index):
    return tuple(f"u{index}_{k + 1}" for k in range(n))


def blowup_charts(I: MonomialIdeal, generators=None, coefficients=None) -> ChartAtlas:
    """One chart per maximal cone; ``generators`` may repeat or be non-minimal."""
    _check_ideal(I)
    from .poly import Scalar
    gens = tuple(tuple(g) for g in (generators if generators is not None else I.gens))
    if any(not I.contains_monomial(g) for g in gens) or any(
            not any(_divides(g, h) for g in gens) for h in I.gens):
        raise ValueError("generator list does not generate the ideal")
    coeffs = tuple(Scalar.coerce(c) for c in (coefficients or [1] * len(gens)))
    P = newton_polyhedron(I)
    fan = normal_fan(NewtonPolyhedron(I.nvars, (), I.gens))
    charts = []
    n = I.nvars
    for idx, cone in enumerate(fan.max_cones):
        rays = tuple(fan.rays[i] for i in cone)
        a = _cone_vertex(P, list(rays))
        coords = chart_coords(n, idx)
        e_exp = tuple(dot(r, a) for r in rays)
        ft = []
        for g, c in zip(gens, coeffs):
            exp = tuple(dot(r, tuple(x - y for x, y in zip(g, a))) for r in rays)
            ft.append(LaurentPoly(coords, {exp: c}))
        charts.append(Chart(idx, cone, coords, rays, a, e_exp, tuple(ft), gens))
    return ChartAtlas(I, gens, coeffs, P, fan, tuple(charts))


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def orbit_in_VI(I_gens, S) -> bool:
    """A torus orbit with zero set S lies in V(I) iff every generator vanishes there."""
    return all(any(g[j] > 0 for j in S) for g in I_gens)


def exceptional_strata(atlas: ChartAtlas, exceptional_only=False):
    out = []
    for ch in atlas.charts:
        n = len(ch.coords)
        for k in range(n + 1):
            for T in combinations(range(n), k):
                S = ch.image_support(T)
                exc = bool(S) and orbit_in_VI(atlas.ideal.gens, S)
                if exceptional_only and not exc:
                    continue
                torus = tuple(ch.coords[i] for i in range(n) if i not in T)
                out.append(Stratum(ch.index, T, torus, S, exc))
    return out


def strata_over(atlas: ChartAtlas, S):
    """Chart strata mapping onto the X-orbit with zero set ``S``."""
    S = tuple(S)
    return [s for s in exceptional_strata(atlas) if s.image_stratum == S]


# ------------------------------------------------------------ fibre coords

def fiber_parametrization(chart: Chart, zero_set, S):
    """Parametrise the stratum's fibre over a point of the orbit ``O_S``.

    Returns ``(B, K)``: integer matrices such that for base parameters
    ``x_j`` (j not in S) and fibre coordinates ``t``, the stratum point is
    ``u_k = prod_j x_j^{B[k][j]} * prod_l t_l^{K[k][l]}`` for k off the zero
    set (and ``u_k = 0`` on it).
    """
    n = len(chart.rays)
    T = list(zero_set)
    Tc = [k for k in range(n) if k not in T]
    Sc = [j for j in range(n) if j not in S]
    # A^T: rows j in Sc, columns k in Tc
    At = [[chart.rays[k][j] for k in Tc] for j in Sc]
    U = _column_unimodular_reduce(At, len(Tc))
    m = len(Sc)
    H = [[sum(At[i][p] * U[p][q] for p in range(len(Tc))) for q in range(m)] for i in range(m)]
    Hinv = unimodular_inverse(H) if m else []
    B = [[sum(U[k][q] * Hinv[q][j] for q in range(m)) for j in range(m)] for k in range(len(Tc))]
    K = [[U[k][q] for q in range(m, len(Tc))] for k in range(len(Tc))]
    return Tc, Sc, B, K


def _column_unimodular_reduce(A, ncols):
    """Unimodular U with A U = [H | 0], H square lower triangular (A full row rank)."""
    rows = len(A)
    M = [list(r) for r in A]
    U = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def colop(i, j, q):
        # col_j -= q * col_i
        for r in M:
            r[j] -= q * r[i]
        for r in U:
            r[j] -= q * r[i]

    def swap(i, j):
        for r in M:
            r[i], r[j] = r[j], r[i]
        for r in U:
            r[i], r[j] = r[j], r[i]

    for r in range(rows):
        while True:
            nz = [c for c in range(r, ncols) if M[r][c] != 0]
            if not nz:
                raise ValueError("matrix does not have full row rank")
            c = min(nz, key=lambda c: abs(M[r][c]))
            if c != r:
                swap(r, c)
            done = True
            for c2 in range(r + 1, ncols):
                if M[r][c2] != 0:
                    colop(r, c2, M[r][c2] // M[r][r])
                    if M[r][c2] != 0:
                        done = False
            if done:
                break
    return U
