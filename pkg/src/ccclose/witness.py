"""Continuous semi-algebraic witnesses and their numeric validation.

A witness writes ``g = sum_i phi_i f_i`` with

    phi_i = h_i + N_i / D,

``h_i`` polynomials in ``x``, and ``N_i``, ``D`` polynomials in ``x`` and the
formal conjugates ``conj(x)``. The cleared identity

    sum_i (h_i D + N_i) f_i - g D = 0

is checked exactly in the ring ``Q(i)[x, conj(x)]``. Continuity is checked
numerically on shrinking spheres around points of ``V(I)``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .errors import ZeroIdealError
from .newton import blowup_charts, dot, orbit_in_VI
from .poly import LaurentPoly, MonomialIdeal, parse_poly

DEFAULT_RADII = tuple(10.0 ** -k for k in range(1, 7))


def conj_names(vars):
    """Names for the formal conjugates, avoiding clashes with ``vars``."""
    taken = set(vars)
    out = []
    for v in vars:
        name = f"{v}_c"
        while name in taken:
            name += "c"
        taken.add(name)
        out.append(name)
    return tuple(out)


def ring_vars(vars):
    return tuple(vars) + conj_names(vars)


def lift(p: LaurentPoly, vars) -> LaurentPoly:
    """``p`` in ``x`` as an element of ``Q(i)[x, conj(x)]``."""
    n = len(vars)
    return p.embed(ring_vars(vars), list(range(n)))


def formal_conj(p: LaurentPoly, vars) -> LaurentPoly:
    """``conj(p)``: conjugate coefficients and move ``x`` to ``conj(x)``."""
    n = len(vars)
    return p.conj().embed(ring_vars(vars), list(range(n, 2 * n)))


def abs2(p: LaurentPoly, vars) -> LaurentPoly:
    return lift(p, vars) * formal_conj(p, vars)


@dataclass(frozen=True)
class Witness:
    vars: tuple
    generators: tuple          # f_i as LaurentPoly in vars
    g: LaurentPoly
    algebraic: tuple           # h_i
    numerators: tuple = ()     # N_i in ring vars (empty for a purely algebraic witness)
    denominator: LaurentPoly | None = None
    kind: str = "canonical"

    @property
    def rank(self):
        return len(self.generators)

    def identity_cleared(self) -> LaurentPoly:
        rv = ring_vars(self.vars)
        D = self.denominator if self.denominator is not None else LaurentPoly.one(rv)
        total = -(lift(self.g, self.vars) * D)
        for i, f in enumerate(self.generators):
            h = lift(self.algebraic[i], self.vars) * D
            if self.numerators:
                h = h + self.numerators[i]
            total = total + h * lift(f, self.vars)
        return total

    def identity_holds(self) -> bool:
        return not self.identity_cleared()

    def exprs(self):
        """Human-readable ``phi_i`` with ``conj(x)`` spelled out."""
        names = dict(zip(conj_names(self.vars), (f"conj({v})" for v in self.vars)))

        def show(p):
            s = str(p)
            for k in sorted(names, key=len, reverse=True):
                s = s.replace(k, names[k])
            return s

        out = []
        for i in range(self.rank):
            parts = []
            if self.algebraic[i]:
                parts.append(f"({self.algebraic[i]})")
            if self.numerators and self.numerators[i]:
                parts.append(f"({show(self.numerators[i])})/({show(self.denominator)})")
            out.append(" + ".join(parts) if parts else "0")
        return out

    def to_json(self):
        doc = {
            "kind": self.kind,
            "vars": list(self.vars),
            "generators": [str(f) for f in self.generators],
            "candidate": str(self.g),
            "algebraic": [str(h) for h in self.algebraic],
            "exprs": self.exprs(),
        }
        if self.numerators:
            doc["conj_vars"] = list(conj_names(self.vars))
            doc["numerators"] = [str(N) for N in self.numerators]
            doc["denominator"] = str(self.denominator)
        return doc

    @classmethod
    def from_json(cls, doc):
        vs = tuple(doc["vars"])
        rv = ring_vars(vs)
        gens = tuple(parse_poly(s, vs) for s in doc["generators"])
        g = parse_poly(doc["candidate"], vs)
        alg = tuple(parse_poly(s, vs) for s in doc["algebraic"])
        nums, den = (), None
        if doc.get("numerators"):
            nums = tuple(parse_poly(s, rv) for s in doc["numerators"])
            den = parse_poly(doc["denominator"], rv)
        return cls(vs, gens, g, alg, nums, den, doc.get("kind", "custom"))


# ------------------------------------------------------------ constructors

def _generator_polys(I: MonomialIdeal, generators=None, coefficients=None):
    gens = list(generators) if generators is not None else list(I.gens)
    coeffs = list(coefficients) if coefficients is not None else [1] * len(gens)
    if not gens:
        raise ZeroIdealError("zero ideal")
    return tuple(LaurentPoly.monomial(I.vars, a, c) for a, c in zip(gens, coeffs))


def canonical_witness(I: MonomialIdeal, g: LaurentPoly, algebraic=None, generators=None,
                      coefficients=None) -> Witness:
    """``phi_i = h_i + conj(f_i) (g - sum h_j f_j) / sum_j |f_j|^2``."""
    fs = _generator_polys(I, generators, coefficients)
    vs = I.vars
    h = tuple(algebraic) if algebraic is not None else tuple(LaurentPoly.zero(vs) for _ in fs)
    rem = g
    for hi, f in zip(h, fs):
        rem = rem - hi * f
    if not rem:
        return Witness(vs, fs, g, h, (), None, "algebraic")
    D = LaurentPoly.zero(ring_vars(vs))
    for f in fs:
        D = D + abs2(f, vs)
    nums = tuple(formal_conj(f, vs) * lift(rem, vs) for f in fs)
    return Witness(vs, fs, g, h, nums, D, "canonical")


def algebraic_witness(I: MonomialIdeal, g: LaurentPoly, multipliers, generators=None,
                      coefficients=None) -> Witness:
    fs = _generator_polys(I, generators, coefficients)
    return Witness(I.vars, fs, g, tuple(multipliers), (), None, "algebraic")


def displayed_witness(vars=("z1", "z2")) -> Witness:
    """The displayed witness for ``z1^2 z2^2`` in ``(z1^3, z2^3)``.

    phi_1 = conj(z1) z2^2 / (|z1|^2 + |z2|^2), phi_2 = conj(z2) z1^2 / (...).
    """
    vs = tuple(vars)
    z1, z2 = (LaurentPoly.var(vs, v) for v in vs)
    fs = (z1 ** 3, z2 ** 3)
    g = z1 ** 2 * z2 ** 2
    D = abs2(z1, vs) + abs2(z2, vs)
    n1 = formal_conj(z1, vs) * lift(z2 ** 2, vs)
    n2 = formal_conj(z2, vs) * lift(z1 ** 2, vs)
    zero = LaurentPoly.zero(vs)
    return Witness(vs, fs, g, (zero, zero), (n1, n2), D, "displayed")


def zero_witness(I: MonomialIdeal, generators=None, coefficients=None) -> Witness:
    fs = _generator_polys(I, generators, coefficients)
    vs = I.vars
    return Witness(vs, fs, LaurentPoly.zero(vs), tuple(LaurentPoly.zero(vs) for _ in fs),
                   (), None, "algebraic")


# ------------------------------------------------------------ structure

def exceptional_weights(I: MonomialIdeal, generators=None):
    """Rays whose divisor maps into ``V(I)``, with the order of ``I`` along each."""
    gens = tuple(tuple(a) for a in generators) if generators is not None else None
    return _exceptional_weights(I, gens)


@functools.lru_cache(maxsize=256)
def _exceptional_weights(I, generators):
    atlas = blowup_charts(I, list(generators) if generators is not None else None)
    out = []
    for w in atlas.fan.rays:
        S = tuple(j for j, x in enumerate(w) if x > 0)
        if S and orbit_in_VI(atlas.generators, S):
            out.append((tuple(w), min(dot(w, a) for a in atlas.generators)))
    return tuple(out)


def vanishes_on_exceptional(I: MonomialIdeal, p: LaurentPoly, generators=None) -> bool:
    """Does ``p∘π / u^e`` vanish on the whole preimage of ``V(I)``?

    Equivalently every term ``m`` has ``<w, m> > ord_w(I)`` for each exceptional ray.
    """
    ws = exceptional_weights(I, generators)
    return all(dot(w, m) > o for m in p.terms for w, o in ws)


def structurally_continuous(W: Witness, I: MonomialIdeal, generators=None) -> bool:
    """The witness is canonical over a remainder that vanishes on the exceptional locus.

    Then ``|N_i / D| <= |rem| / |f|``, and ``rem/|f|`` tends to zero at ``V(I)``
    because its chart expression vanishes on the preimage of ``V(I)``.
    """
    if not W.numerators:
        return all(h.is_polynomial() for h in W.algebraic)
    vs = W.vars
    rem = W.g
    for h, f in zip(W.algebraic, W.generators):
        rem = rem - h * f
    D = LaurentPoly.zero(ring_vars(vs))
    for f in W.generators:
        D = D + abs2(f, vs)
    if D != W.denominator:
        return False
    for N, f in zip(W.numerators, W.generators):
        if N != formal_conj(f, vs) * lift(rem, vs):
            return False
    return all(h.is_polynomial() for h in W.algebraic) and vanishes_on_exceptional(I, rem, generators)


def monomial_quotient_continuous(W: Witness) -> bool:
    """Each ``phi_i`` is a sum of ``x^a conj(x)^b`` over ``sum c_k |x^{e_k}|^2``.

    With ``J = (x^{e_k})`` and every ``c_k`` a positive rational, a term is
    bounded near ``V(J)`` when ``a + b`` lies in the Newton polyhedron of
    ``J^2``, and it tends to zero there when the inequality is strict along
    every exceptional ray of ``J``. Defining ``phi_i = 0`` on ``V(J)`` then
    gives a continuous function.
    """
    if W.denominator is None or not W.numerators:
        return False
    if not all(h.is_polynomial() for h in W.algebraic):
        return False
    n = len(W.vars)
    es = []
    for e, c in W.denominator.terms.items():
        half, other = tuple(e[:n]), tuple(e[n:])
        if half != other or min(half) < 0:
            return False
        re, im = complex(c).real, complex(c).imag
        if im != 0 or re <= 0:
            return False
        es.append(half)
    J = MonomialIdeal(W.vars, es)
    atlas = blowup_charts(J, es)
    exceptional = {w for w, _ in _exceptional_weights(J, tuple(es))}
    for N in W.numerators:
        for e in N.terms:
            if min(e) < 0:
                return False
            c = tuple(e[j] + e[n + j] for j in range(n))
            for w in atlas.fan.rays:
                lhs, rhs = dot(w, c), 2 * min(dot(w, a) for a in es)
                if lhs < rhs or (tuple(w) in exceptional and lhs == rhs):
                    return False
    return True


def certified_continuous(W: Witness, I: MonomialIdeal, generators=None) -> bool:
    """Either of the two exact continuity arguments applies."""
    return structurally_continuous(W, I, generators) or monomial_quotient_continuous(W)


# ------------------------------------------------------------ validation

@dataclass
class ValidationConfig:
    seed: int = 20240607
    n_points: int = 200
    radii: tuple = DEFAULT_RADII
    residual_tol: float = 1e-10
    envelope_factor: float = 2.0
    decay_ratio: float = 0.5
    absolute_floor: float = 1e-12
    sphere_points: int = 64
    toric_points: int = 16
    centers_per_orbit: int = 2


@dataclass
class Report:
    residual_max: float
    envelopes: list
    passed: bool
    seed: int
    thresholds: dict
    residual_ok: bool = True
    envelope_ok: bool = True
    centers: list = field(default_factory=list)
    backend: str = "numpy"
    note: str = ""

    def to_json(self):
        return {
            "residual_max": self.residual_max,
            "envelopes": self.envelopes,
            "pass": self.passed,
            "residual_ok": self.residual_ok,
            "envelope_ok": self.envelope_ok,
            "seed": self.seed,
            "thresholds": self.thresholds,
            "centers": self.centers,
            "backend": self.backend,
            "note": self.note,
        }


class _Numeric:
    """Packed arrays for fast evaluation of a witness."""

    def __init__(self, W: Witness):
        n = len(W.vars)
        self.n = n
        self.f = [kernels.pack(f, n) for f in W.generators]
        self.h = [kernels.pack(h, n) for h in W.algebraic]
        self.g = kernels.pack(W.g, n)
        self.N = [kernels.pack(N, n, n) for N in W.numerators] if W.numerators else None
        self.D = kernels.pack(W.denominator, n, n) if W.numerators else None

    def ev(self, packed, pts):
        return kernels.evaluate(packed[0], packed[1], pts)

    def phi(self, pts):
        out = np.stack([self.ev(h, pts) for h in self.h])
        if self.N is not None:
            D = self.ev(self.D, pts)
            out = out + np.stack([self.ev(N, pts) for N in self.N]) / D
        return out                                   # (r, P)

    def phi_on_VI(self, center):
        """Value assigned on ``V(I)``: the algebraic part (the quotient part is 0 there)."""
        pts = np.asarray([center], dtype=np.complex128)
        return np.array([self.ev(h, pts)[0] for h in self.h])

    def residual(self, pts):
        phi = self.phi(pts)
        fs = np.stack([self.ev(f, pts) for f in self.f])
        g = self.ev(self.g, pts)
        return np.abs(g - (phi * fs).sum(axis=0)) / (1 + np.abs(g))

    def denominator_ok(self, pts):
        if self.D is None:
            return np.ones(len(pts), dtype=bool)
        return np.abs(self.ev(self.D, pts)) > 0


def _unit_polydisc(rng, P, n):
    r = np.sqrt(rng.random((P, n)))
    th = rng.random((P, n)) * 2 * math.pi
    return r * np.exp(1j * th)


def _sphere(rng, P, n, radius):
    v = rng.standard_normal((P, 2 * n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return radius * (v[:, :n] + 1j * v[:, n:])


def _toric_sphere(rng, P, n, radius, weights, S):
    """Points on the sphere of radius ``radius`` hugging the curves ``x_j ~ t^{w_j}``.

    Uniform sphere samples miss the thin regions where a blow-up chart sees
    the exceptional divisor (e.g. ``y ~ x^2``); these samples follow each
    exceptional weight ``w`` supported in ``S``.
    """
    out = []
    for w in weights:
        supp = [j for j in range(n) if w[j] > 0]
        if not supp or not set(supp) <= set(S):
            continue
        m = min(w[j] for j in supp)
        expo = np.array([w[j] / m if w[j] > 0 else 1.0 for j in range(n)])
        mod = np.exp(rng.uniform(math.log(0.25), math.log(4.0), (P, n)))
        th = rng.random((P, n)) * 2 * math.pi
        v = mod * radius ** expo[None, :] * np.exp(1j * th)
        v[:, [j for j in range(n) if j not in S]] *= 0.0
        v *= radius / np.linalg.norm(np.abs(v), axis=1, keepdims=True)
        out.append(v)
    return np.concatenate(out, axis=0) if out else np.zeros((0, n), dtype=np.complex128)


def vanishing_centers(I: MonomialIdeal, rng, per_orbit=2):
    """Sample points of ``V(I)``: one per deepest orbit, ``per_orbit`` elsewhere."""
    n = I.nvars
    out = []
    for S in sorted(I.vanishing_supports(), key=lambda s: (-len(s), s)):
        k = 1 if len(S) == n else per_orbit
        for _ in range(k):
            c = np.zeros(n, dtype=np.complex128)
            for j in range(n):
                if j not in S:
                    c[j] = _unit_polydisc(rng, 1, 1)[0, 0] * 0.8 + 0.1
            out.append(c)
    return out


def validate_witness(W: Witness, I: MonomialIdeal, g=None, config: ValidationConfig | None = None) -> Report:
    """Residual of the identity off ``V(I)`` and continuity envelopes at ``V(I)``."""
    cfg = config or ValidationConfig()
    rng = np.random.default_rng(cfg.seed)
    num = _Numeric(W)
    n = num.n
    thresholds = {"residual_tol": cfg.residual_tol, "envelope_factor": cfg.envelope_factor,
                  "decay_ratio": cfg.decay_ratio, "absolute_floor": cfg.absolute_floor,
                  "radii": list(cfg.radii), "n_points": cfg.n_points,
                  "sphere_points": cfg.sphere_points, "toric_points": cfg.toric_points}
    pts = _unit_polydisc(rng, cfg.n_points, n)
    pts = pts[num.denominator_ok(pts)]
    res = float(num.residual(pts).max()) if len(pts) else 0.0
    residual_ok = res <= cfg.residual_tol
    centers = vanishing_centers(I, rng, cfg.centers_per_orbit) if I.vanishing_supports() else []
    env = [0.0] * len(cfg.radii)
    weights = [w for w, _ in exceptional_weights(I, [next(iter(f.terms)) for f in W.generators])]
    for c in centers:
        base = num.phi_on_VI(c)
        S = [j for j in range(n) if c[j] == 0]
        for k, rad in enumerate(cfg.radii):
            q = c[None, :] + np.concatenate(
                [_sphere(rng, cfg.sphere_points, n, rad),
                 _toric_sphere(rng, cfg.toric_points, n, rad, weights, S)], axis=0)
            q = q[num.denominator_ok(q)]
            if not len(q):
                continue
            dev = np.abs(num.phi(q) - base[:, None]).max()
            env[k] = max(env[k], float(dev))
    envelope_ok = _envelope_ok(env, cfg)
    return Report(res, env, bool(residual_ok and envelope_ok), cfg.seed, thresholds,
                  bool(residual_ok), bool(envelope_ok),
                  [[complex(z).real for z in c] + [complex(z).imag for z in c] for c in centers],
                  kernels.backend())


def _envelope_ok(env, cfg):
    if not env or max(env) <= cfg.absolute_floor:
        return True
    for a, b in zip(env, env[1:]):
        if b > cfg.envelope_factor * max(a, cfg.absolute_floor):
            return False
    return env[-1] <= cfg.decay_ratio * env[0] or env[-1] <= cfg.absolute_floor


# --------------------------------------------------------- numeric oracle

@dataclass
class OracleResult:
    scales: list
    gradients: list
    residuals: list
    growth: float

    def to_json(self):
        return asdict(self)


def least_squares_oracle(I: MonomialIdeal, g: LaurentPoly, center=None, generators=None,
                         coefficients=None, levels=4, factor=20.0, rho0=0.5, seed=20240607,
                         samples=400, reg=1e-8) -> OracleResult:
    """Fit affine coefficient functions on nested balls around ``center``.

    On the ball of radius ``rho`` we fit ``phi_i(x) = a_i + b_i . xi`` with
    ``xi`` the real coordinates of ``(x - center)/rho``, minimising
    ``sum |sum_i phi_i f_i - g|^2 / |f|^2`` plus a small ridge term. The
    physical gradient ``|b| / rho`` stays bounded when a continuous solution
    exists; it grows like ``1/rho`` when the pointwise solutions jump.
    """
    fs = _generator_polys(I, generators, coefficients)
    n = I.nvars
    c = np.zeros(n, dtype=np.complex128) if center is None else np.asarray(center, dtype=np.complex128)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((samples, 2 * n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    v *= rng.random((samples, 1)) ** (1.0 / (2 * n))
    xi = v                                                # fixed grid, rescaled per level
    fp = [kernels.pack(f, n) for f in fs]
    gp = kernels.pack(g, n)
    r = len(fs)
    scales, grads, resid = [], [], []
    for lev in range(levels):
        rho = rho0 / factor ** lev
        pts = c[None, :] + rho * (xi[:, :n] + 1j * xi[:, n:])
        F = np.stack([kernels.evaluate(a, b, pts) for a, b in fp], axis=1)   # (P, r)
        G = kernels.evaluate(gp[0], gp[1], pts)
        norm = np.sqrt((np.abs(F) ** 2).sum(axis=1))
        keep = norm > 0
        F, G, X, norm = F[keep], G[keep], xi[keep], norm[keep]
        basis = np.concatenate([np.ones((len(X), 1)), X], axis=1)          # (P, 1+2n)
        A = (F[:, :, None] * basis[:, None, :]).reshape(len(X), -1) / norm[:, None]
        y = G / norm
        lam = math.sqrt(reg)
        A2 = np.concatenate([A, lam * np.eye(A.shape[1])], axis=0)
        y2 = np.concatenate([y, np.zeros(A.shape[1])])
        sol, *_ = np.linalg.lstsq(A2, y2, rcond=None)
        coef = sol.reshape(r, 1 + 2 * n)
        grad = float(np.linalg.norm(coef[:, 1:], axis=1).max()) / rho
        scales.append(rho)
        grads.append(grad)
        resid.append(float(np.abs(A @ sol - y).max()))
    floor = 1e-300
    growth = grads[-1] / max(grads[0], floor)
    return OracleResult(scales, grads, resid, growth)
