"""Descent problems and the scion calculus.

A descent problem is ``(p: Y -> X, f: p*E -> F)`` with ``E`` trivial of rank
``r``. Two backends describe ``Y``:

* ``SymbolicModel``: a list of pieces, each an affine space (or a family of
  them over base parameters) with a monomial map to ``X`` and the matrix of
  ``f`` as Laurent polynomials in the piece coordinates.
* ``FiniteModel``: finitely many labelled points over labelled base points,
  with ``f`` given by a Scalar matrix at each point.

Every problem carries a ``ScionNode`` recording the operations that produced
it, so a scion can be replayed from its root.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, replace
from itertools import combinations, product

from . import linalg
from .errors import DimensionCapError, PreconditionError, ScionError
from .newton import ChartAtlas, blowup_charts, fiber_parametrization
from .poly import MAX_VARS, LaurentPoly, MonomialIdeal, Scalar


# -------------------------------------------------------------- provenance

@dataclass(frozen=True)
class ScionNode:
    kind: str                      # root, pullback, diagonal, factor, restrict
    params: tuple = ()             # ((key, value), ...) in a fixed order
    parent: "ScionNode | None" = None
    surjective: bool = True
    justification: str = ""
    witness: object = None

    def lineage(self):
        out = []
        node = self
        while node is not None:
            out.append(node)
            node = node.parent
        return out[::-1]

    def param(self, key, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default

    def dump(self) -> str:
        """Deterministic text form of the operation sequence, root first."""
        lines = []
        for depth, node in enumerate(self.lineage()):
            shown = " ".join(f"{k}={_describe(v)}" for k, v in node.params
                             if k not in ("map", "maps", "embedding"))
            flag = "surjective" if node.surjective else "not-surjective"
            lines.append(f"{depth} {node.kind} {shown} [{flag}: {node.justification}]".rstrip())
        return "\n".join(lines)


def _describe(v):
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_describe(x) for x in v) + "]"
    if isinstance(v, LaurentPoly):
        return str(v)
    return str(v)


# -------------------------------------------------------------- Y models

@dataclass(frozen=True)
class Piece:
    """A chart-like piece of ``Y``.

    ``params`` are base coordinates shared by every piece of a fibred model
    (empty for charts); ``coords`` are the piece's own coordinates. All
    polynomials live in ``params + coords``.
    """

    label: str
    params: tuple
    coords: tuple
    x_images: tuple               # n LaurentPoly (zero where the piece maps into x_j = 0)
    f_rows: tuple                 # rows of r LaurentPoly; F has rank len(f_rows)
    chart: tuple = ()             # source chart per diagonal factor
    zero_set: tuple = ()          # chart coordinates set to zero by restriction
    source_images: tuple = ()     # per factor: images of the source chart coordinates

    @property
    def vars(self):
        return self.params + self.coords

    def f_column(self, i):
        return [row[i] for row in self.f_rows]


@dataclass(frozen=True)
class SymbolicModel:
    pieces: tuple

    @property
    def F_rank(self):
        return len(self.pieces[0].f_rows) if self.pieces else 0


@dataclass(frozen=True)
class FiniteModel:
    """Finite Y: ``labels[k]`` lies over base point ``bases[k]``."""

    labels: tuple
    bases: tuple
    matrices: tuple               # per point: tuple of rows of Scalar (F_rank x r)

    def __post_init__(self):
        if not (len(self.labels) == len(self.bases) == len(self.matrices)):
            raise ValueError("labels, bases and matrices must have equal length")
        mats = tuple(tuple(tuple(Scalar.coerce(x) for x in row) for row in m) for m in self.matrices)
        object.__setattr__(self, "matrices", mats)

    @property
    def F_rank(self):
        return len(self.matrices[0]) if self.matrices else 0

    def fiber(self, base):
        return [k for k, b in enumerate(self.bases) if b == base]

    def base_points(self):
        return list(dict.fromkeys(self.bases))


@dataclass(frozen=True)
class DescentProblem:
    vars: tuple
    E_rank: int
    model: object                 # SymbolicModel | FiniteModel
    provenance: ScionNode
    Z: tuple | None = None        # supports of orbit closures, or base labels
    atlas: ChartAtlas | None = None

    @property
    def F_rank(self):
        return self.model.F_rank

    @property
    def is_finite(self):
        return isinstance(self.model, FiniteModel)

    def same_data(self, other) -> bool:
        return self.model == other.model and self.E_rank == other.E_rank and self.Z == other.Z


# --------------------------------------------------------------- maps

@dataclass(frozen=True)
class PieceMap:
    """Maps a new piece into ``target`` of the old model by coordinate images."""

    target: int
    label: str
    params: tuple
    coords: tuple
    images: tuple                 # LaurentPoly in params+coords, one per target var


@dataclass(frozen=True)
class ProperMap:
    pieces: tuple                 # tuple of PieceMap

    @classmethod
    def identity(cls, D: DescentProblem):
        out = []
        for idx, pc in enumerate(D.model.pieces):
            vs = pc.vars
            out.append(PieceMap(idx, pc.label, pc.params, pc.coords,
                                tuple(LaurentPoly.var(vs, v) for v in vs)))
        return cls(tuple(out))


@dataclass(frozen=True)
class PointMap:
    """Finite model map: new point ``k`` goes to old point ``images[k]``."""

    labels: tuple
    images: tuple


# ------------------------------------------------------------ constructors

@functools.lru_cache(maxsize=128)
def _atlas_cached(I: MonomialIdeal, generators, coefficients):
    return blowup_charts(I, list(generators) if generators else None,
                         list(coefficients) if coefficients else None)


def from_ideal(I: MonomialIdeal, generators=None, coefficients=None) -> DescentProblem:
    """The blow-up problem: Y = B_I X, E = O^r, F = O_Y(-E), f = (f~_1..f~_r)."""
    if I.nvars > MAX_VARS:
        raise DimensionCapError(f"at most {MAX_VARS} variables are supported")
    gens = tuple(tuple(g) for g in generators) if generators is not None else None
    coeffs = tuple(Scalar.coerce(c) for c in coefficients) if coefficients is not None else None
    atlas = _atlas_cached(I, gens, coeffs)
    pieces = []
    for ch in atlas.charts:
        x_images = tuple(ch.map_to_X(I.vars))
        ident = tuple(LaurentPoly.var(ch.coords, c) for c in ch.coords)
        pieces.append(Piece(f"chart{ch.index}", (), ch.coords, x_images,
                            (tuple(ch.f_tilde),), (ch.index,), (), (ident,)))
    node = ScionNode("root", (("ideal", str(I)), ("generators", atlas.generators)),
                     None, True, "blow-up is proper and birational")
    return DescentProblem(I.vars, atlas.rank, SymbolicModel(tuple(pieces)), node, None, atlas)


def finite_problem(vars, labels, bases, matrices, E_rank=None) -> DescentProblem:
    fm = FiniteModel(tuple(labels), tuple(bases), tuple(matrices))
    r = E_rank if E_rank is not None else (len(fm.matrices[0][0]) if fm.matrices else 0)
    node = ScionNode("root", (("points", len(labels)),), None, True, "finite model")
    return DescentProblem(tuple(vars), r, fm, node)


# ---------------------------------------------------------- scion operations

def _pull_piece(pc: Piece, pm: PieceMap) -> Piece:
    vs = pm.params + pm.coords
    if len(pm.images) != len(pc.vars):
        raise ScionError(f"map into {pc.label} needs {len(pc.vars)} coordinate images")
    for img in pm.images:
        if img.vars != vs:
            raise ScionError("coordinate images must live in the new piece's variables")
    sub = (lambda p: p.substitute(list(pm.images))) if pc.vars else (
        lambda p: LaurentPoly.const(vs, p.constant_term()))
    rows = tuple(tuple(sub(x) for x in row) for row in pc.f_rows)
    srcs = tuple(tuple(sub(x) for x in imgs) for imgs in pc.source_images)
    return Piece(pm.label, pm.params, pm.coords, tuple(sub(x) for x in pc.x_images), rows,
                 pc.chart, pc.zero_set, srcs)


def scion_pullback(D: DescentProblem, r1) -> DescentProblem:
    """Pull ``D`` back along a proper surjective map onto ``Y``."""
    if D.is_finite:
        if not isinstance(r1, PointMap):
            raise ScionError("finite models pull back along a PointMap")
        n_old = len(D.model.labels)
        if set(r1.images) != set(range(n_old)):
            raise ScionError("point map does not cover every point of Y")
        fm = FiniteModel(tuple(r1.labels), tuple(D.model.bases[k] for k in r1.images),
                         tuple(D.model.matrices[k] for k in r1.images))
        node = ScionNode("pullback", (("map", r1), ("points", len(r1.labels))), D.provenance,
                         True, "point map is onto")
        return replace(D, model=fm, provenance=node)
    if not isinstance(r1, ProperMap):
        raise ScionError("symbolic models pull back along a ProperMap")
    old = D.model.pieces
    hit = {pm.target for pm in r1.pieces}
    if hit != set(range(len(old))):
        missing = sorted(set(range(len(old))) - hit)
        raise ScionError(f"map does not cover the pieces {missing}")
    new = tuple(_pull_piece(old[pm.target], pm) for pm in r1.pieces)
    node = ScionNode("pullback", (("map", r1), ("pieces", len(new))), D.provenance, True,
                     "covers every piece")
    return replace(D, model=SymbolicModel(new), provenance=node)


def stellar_refinement(D: DescentProblem, piece: int, ray) -> ProperMap:
    """Map from the stellar subdivision of one chart's cone along ``ray``.

    ``ray`` is given in the chart's own lattice basis (non-negative integers).
    The other pieces map identically.
    """
    pcs = D.model.pieces
    ident = ProperMap.identity(D).pieces
    pc = pcs[piece]
    lam = [int(x) for x in ray]
    if len(lam) != len(pc.coords) or any(x < 0 for x in lam) or not any(lam):
        raise ScionError("ray must be a non-zero non-negative vector in chart coordinates")
    out = []
    for idx, pm in enumerate(ident):
        if idx != piece:
            out.append(pm)
            continue
        n = len(pc.coords)
        for k in range(n):
            if lam[k] == 0:
                continue
            coords = tuple(f"{c}_s{k + 1}" for c in pc.coords)
            vs = pc.params + coords
            # old u_j = prod_l v_l^{M[l][j]}, M = sub-cone rays in the old basis
            M = [[int(l == j) for j in range(n)] for l in range(n)]
            M[k] = list(lam)
            imgs = [LaurentPoly.var(vs, v) for v in pc.params]
            for j in range(n):
                exp = [0] * len(pc.params) + [M[l][j] for l in range(n)]
                imgs.append(LaurentPoly.monomial(vs, exp))
            out.append(PieceMap(idx, f"{pc.label}/s{k + 1}", pc.params, coords, tuple(imgs)))
    return ProperMap(tuple(out))


def scion_diagonal(D: DescentProblem, maps) -> DescentProblem:
    """Stack ``r_i* f`` over a common source with equal composites to ``X``."""
    maps = list(maps)
    if not maps:
        raise ScionError("diagonal needs at least one map")
    if D.is_finite:
        labels = maps[0].labels
        for m in maps:
            if m.labels != labels:
                raise ScionError("all maps must share one source")
        mats, bases = [], []
        for k in range(len(labels)):
            base = {D.model.bases[m.images[k]] for m in maps}
            if len(base) != 1:
                raise ScionError(f"composite to X differs at point {labels[k]!r}")
            bases.append(base.pop())
            mats.append(tuple(row for m in maps for row in D.model.matrices[m.images[k]]))
        fm = FiniteModel(tuple(labels), tuple(bases), tuple(mats))
        node = ScionNode("diagonal", (("maps", tuple(maps)), ("copies", len(maps))), D.provenance,
                         _covers_finite(D, maps), "projections of a fibre product")
        return replace(D, model=fm, provenance=node)
    srcs = [tuple((pm.label, pm.params, pm.coords) for pm in m.pieces) for m in maps]
    if any(s != srcs[0] for s in srcs):
        raise ScionError("all maps must share one source")
    pcs = D.model.pieces
    new = []
    for j in range(len(srcs[0])):
        pulled = [_pull_piece(pcs[m.pieces[j].target], m.pieces[j]) for m in maps]
        xs = pulled[0].x_images
        if any(p.x_images != xs for p in pulled):
            raise ScionError(f"composite to X differs on source piece {srcs[0][j][0]!r}")
        rows = tuple(row for p in pulled for row in p.f_rows)
        charts = tuple(c for p in pulled for c in p.chart)
        srcs = tuple(s for p in pulled for s in p.source_images)
        new.append(Piece(pulled[0].label, pulled[0].params, pulled[0].coords, xs, rows, charts,
                         pulled[0].zero_set, srcs))
    hit = {pm.target for m in maps for pm in m.pieces}
    node = ScionNode("diagonal", (("maps", tuple(maps)), ("copies", len(maps))), D.provenance,
                     hit == set(range(len(pcs))), "projections of a fibre product")
    return replace(D, model=SymbolicModel(tuple(new)), provenance=node)


def _covers_finite(D, maps):
    return {k for m in maps for k in m.images} == set(range(len(D.model.labels)))


def fiber_product_maps(D: DescentProblem, m: int):
    """Projections of the ``m``-fold fibre product of ``Y`` over ``X``.

    For finite models the fibre product is enumerated. For symbolic models
    it is built for fibred models (every piece maps ``coords`` into a single
    fibre over the shared ``params``), where it is the product of fibres.
    """
    if D.is_finite:
        fm = D.model
        tuples = []
        for base in fm.base_points():
            fib = fm.fiber(base)
            tuples.extend(product(fib, repeat=m))
        labels = tuple("(" + ",".join(str(fm.labels[k]) for k in t) + ")" for t in tuples)
        return [PointMap(labels, tuple(t[i] for t in tuples)) for i in range(m)]
    pcs = D.model.pieces
    params = pcs[0].params if pcs else ()
    if any(pc.params != params for pc in pcs):
        raise ScionError("fibre products need a fibred model with shared parameters")
    if not params and any(not _is_fibre_piece(pc) for pc in pcs):
        raise ScionError("pieces do not lie over a single base point")
    maps = [[] for _ in range(m)]
    for combo in product(range(len(pcs)), repeat=m):
        coords = tuple(f"{c}_{i + 1}" for i, idx in enumerate(combo) for c in pcs[idx].coords)
        vs = params + coords
        label = "x".join(pcs[idx].label for idx in combo)
        offset = 0
        for i, idx in enumerate(combo):
            pc = pcs[idx]
            imgs = [LaurentPoly.var(vs, v) for v in params]
            imgs += [LaurentPoly.var(vs, coords[offset + k]) for k in range(len(pc.coords))]
            offset += len(pc.coords)
            maps[i].append(PieceMap(idx, label, params, coords, tuple(imgs)))
    return [ProperMap(tuple(ms)) for ms in maps]


def _is_fibre_piece(pc: Piece):
    return all(x.is_constant() for x in pc.x_images)


def scion_factor(D: DescentProblem, embedding, witness=None) -> DescentProblem:
    """Factor ``f`` as ``j . f'`` through a sub-bundle ``F'``.

    ``embedding`` holds ``j`` per piece (or per point): a ``rank F x rank F'``
    matrix. ``witness`` names a piece/point where ``j`` has full column rank;
    if omitted the first piece/point with full rank is used.
    """
    emb = list(embedding)
    if D.is_finite:
        fm = D.model
        if len(emb) != len(fm.labels):
            raise ScionError("one embedding matrix per point is required")
        new_mats = []
        for k, (j, mat) in enumerate(zip(emb, fm.matrices)):
            j = linalg.to_scalar_matrix(j)
            if len(j) != len(mat):
                raise ScionError(f"embedding at point {k} has the wrong number of rows")
            cols = []
            for i in range(D.E_rank):
                col = linalg.solve(j, [row[i] for row in mat])
                if col is None:
                    raise ScionError(f"f does not factor through F' at point {fm.labels[k]!r}")
                cols.append(col)
            rk = len(j[0]) if j else 0
            new_mats.append(tuple(tuple(cols[i][a] for i in range(D.E_rank)) for a in range(rk)))
        if witness is None:
            witness = next((k for k, j in enumerate(emb)
                            if linalg.rank(j) == (len(j[0]) if j else 0)), None)
        if witness is None or linalg.rank(emb[witness]) != len(emb[witness][0]):
            raise ScionError("rank witness invalid: j is not injective there")
        fm2 = FiniteModel(fm.labels, fm.bases, tuple(new_mats))
        node = ScionNode("factor", (("embedding", tuple(map(tuple, emb))), ("witness", witness)),
                         D.provenance, True, "identity on Y", witness)
        return replace(D, model=fm2, provenance=node)
    pcs = D.model.pieces
    if len(emb) != len(pcs):
        raise ScionError("one embedding matrix per piece is required")
    new = []
    for idx, (j, pc) in enumerate(zip(emb, pcs)):
        j = [list(r) for r in j]
        if len(j) != len(pc.f_rows):
            raise ScionError(f"embedding on {pc.label} has the wrong number of rows")
        rk = len(j[0])
        if linalg.ff_rank(j) != rk:
            raise ScionError(f"embedding on {pc.label} is not injective")
        cols = []
        for i in range(D.E_rank):
            sol, _ = linalg.ff_solve_unique(j, pc.f_column(i))
            if sol is None:
                raise ScionError(f"f does not factor through F' on {pc.label}")
            lp = [s.laurent() for s in sol]
            if any(x is None for x in lp):
                raise ScionError(f"factored map is not regular on {pc.label}")
            cols.append(lp)
        rows = tuple(tuple(cols[i][a] for i in range(D.E_rank)) for a in range(rk))
        new.append(replace(pc, f_rows=rows))
    if witness is None:
        witness = 0
    wj = [list(r) for r in emb[witness]]
    point = _nonvanishing_point(wj)
    if point is None:
        raise ScionError("rank witness invalid: no point with a non-zero maximal minor")
    node = ScionNode("factor", (("embedding", tuple(tuple(map(tuple, e)) for e in emb)),
                                ("witness", witness)),
                     D.provenance, True, "identity on Y", (witness, point))
    return replace(D, model=SymbolicModel(tuple(new)), provenance=node)


def _nonvanishing_point(j):
    """A small integer point where some maximal minor of ``j`` is non-zero."""
    rk = len(j[0])
    vs = j[0][0].vars
    for pt in _small_points(len(vs)):
        vals = [[x.evaluate(pt) for x in row] for row in j]
        if linalg.rank(vals) == rk:
            return pt
    return None


def _small_points(n, limit=4):
    vals = [1, 2, -1, 3, -2, 4][:limit + 2]
    return list(product(vals, repeat=n)) if n else [()]


def restrict(D: DescentProblem, Z) -> DescentProblem:
    """Restrict to the preimage of ``Z``.

    Symbolic models: ``Z`` is a list of supports ``S`` (orbit closures
    ``{x_j = 0, j in S}``); ``None`` or ``[()]`` means ``X``. Finite models:
    ``Z`` is a collection of base labels.
    """
    if D.is_finite:
        keep = set(Z)
        fm = D.model
        idx = [k for k, b in enumerate(fm.bases) if b in keep]
        fm2 = FiniteModel(tuple(fm.labels[k] for k in idx), tuple(fm.bases[k] for k in idx),
                          tuple(fm.matrices[k] for k in idx))
        node = ScionNode("restrict", (("Z", tuple(sorted(keep, key=str))),), D.provenance, True,
                         "reduced preimage")
        return replace(D, model=fm2, provenance=node, Z=tuple(sorted(keep, key=str)))
    Zs = _normalize_Z(Z, len(D.vars))
    if Zs == ((),):
        node = ScionNode("restrict", (("Z", Zs),), D.provenance, True, "Z = X")
        return replace(D, provenance=node, Z=Zs)
    new = []
    for pc in D.model.pieces:
        n = len(pc.coords)
        zs = []
        for k in range(n + 1):
            for T in combinations(range(n), k):
                S = _image_support(pc, T)
                if S is None or not any(set(z) <= set(S) for z in Zs):
                    continue
                if any(set(t) <= set(T) for t in zs):
                    continue
                zs.append(T)
        for T in zs:
            new.append(_restrict_piece(pc, T))
    new = _drop_covered(new)
    node = ScionNode("restrict", (("Z", Zs),), D.provenance, True, "reduced preimage")
    return replace(D, model=SymbolicModel(tuple(new)), provenance=node, Z=_meet(D.Z, Zs))


def _drop_covered(pieces):
    """Drop repeated strata and strata lying in the closure of another one.

    Two pieces are compared only when they come from the same charts; a
    stratum whose zero set strictly contains another's is in its closure.
    """
    out = []
    for i, pc in enumerate(pieces):
        zs = set(pc.zero_set)
        redundant = False
        for j, other in enumerate(pieces):
            if i == j or other.chart != pc.chart or other.params != pc.params:
                continue
            oz = set(other.zero_set)
            if oz < zs or (oz == zs and j < i):
                redundant = True
                break
        if not redundant:
            out.append(pc)
    return out


def _normalize_Z(Z, n):
    if Z is None:
        return ((),)
    Zs = sorted({tuple(sorted(set(S))) for S in Z}, key=lambda s: (len(s), s))
    for S in Zs:
        if any(j < 0 or j >= n for j in S):
            raise PreconditionError(f"support {S} out of range")
    # keep only minimal supports (largest orbit closures)
    out = [S for S in Zs if not any(set(T) < set(S) for T in Zs)]
    return tuple(out)


def _meet(Z1, Z2):
    if Z1 is None or Z1 == ((),):
        return Z2
    out = {tuple(sorted(set(a) | set(b))) for a in Z1 for b in Z2}
    return tuple(S for S in sorted(out, key=lambda s: (len(s), s))
                 if not any(set(T) < set(S) for T in out))


def _image_support(pc: Piece, T):
    """X-support of the image of ``{u_T = 0}``; ``None`` if it is empty (pole)."""
    offset = len(pc.params)
    S = []
    for j, x in enumerate(pc.x_images):
        if not x:
            S.append(j)
            continue
        try:
            r = x.restrict_zero([offset + k for k in T])
        except Exception:
            return None
        if not r:
            S.append(j)
    return tuple(S)


def _coord_key(name):
    head, _, idx = name.rpartition("_")
    return (head, int(idx)) if idx.isdigit() else (name, 0)


def _restrict_piece(pc: Piece, T) -> Piece:
    offset = len(pc.params)
    keep = list(range(offset)) + [offset + k for k in range(len(pc.coords)) if k not in T]
    zero = [offset + k for k in T]

    def res(p):
        return p.restrict_zero(zero).drop_vars(keep)

    coords = tuple(c for k, c in enumerate(pc.coords) if k not in T)
    rows = tuple(tuple(res(x) for x in row) for row in pc.f_rows)
    zs = tuple(sorted(pc.zero_set + tuple(pc.coords[k] for k in T), key=_coord_key))
    srcs = tuple(tuple(res(x) for x in imgs) for imgs in pc.source_images)
    return Piece(f"{pc.label}|{''.join(pc.coords[k] + '=0;' for k in T).rstrip(';')}",
                 pc.params, coords, tuple(res(x) for x in pc.x_images), rows, pc.chart, zs, srcs)


# ------------------------------------------------------------ fibred models

def fibre_over_orbit(D: DescentProblem, S) -> DescentProblem:
    """Fibred model over the X-orbit with zero set ``S``.

    The pieces are the chart strata mapping onto ``O_S``; each is
    parametrised by the base coordinates ``x_j`` (j not in ``S``) and fibre
    torus coordinates. Only root blow-up problems are supported.
    """
    if D.atlas is None or D.is_finite:
        raise ScionError("fibres over orbits are computed from a blow-up atlas")
    S = tuple(sorted(S))
    atlas = D.atlas
    n = len(D.vars)
    params = tuple(D.vars[j] for j in range(n) if j not in S)
    pieces = []
    for ch in atlas.charts:
        for k in range(n + 1):
            for T in combinations(range(n), k):
                if ch.image_support(T) != S:
                    continue
                Tc, Sc, B, K = fiber_parametrization(ch, T, S)
                m = len(K[0]) if K else 0
                coords = tuple(f"t{ch.index}_{''.join(map(str, T))}_{l + 1}" for l in range(m))
                vs = params + coords
                imgs = []
                kk = 0
                for c in range(n):
                    if c in T:
                        imgs.append(LaurentPoly.zero(vs))
                    else:
                        exp = list(B[kk]) + list(K[kk])
                        imgs.append(LaurentPoly.monomial(vs, exp))
                        kk += 1
                rows = (tuple(f.substitute(imgs) for f in ch.f_tilde),)
                xs = tuple(x.substitute(imgs) for x in ch.map_to_X(D.vars))
                pieces.append(Piece(f"chart{ch.index}|T={T}", params, coords, xs, rows,
                                    (ch.index,), tuple(ch.coords[t] for t in T), (tuple(imgs),)))
    node = ScionNode("restrict", (("Z", (S,)), ("fibred", True)), D.provenance, True,
                     "reduced preimage of one orbit")
    return replace(D, model=SymbolicModel(tuple(pieces)), provenance=node, Z=(S,))


# ------------------------------------------------------------------ replay

def replay(node: ScionNode, root: DescentProblem) -> DescentProblem:
    """Re-run the recorded operations of ``node`` starting from ``root``."""
    D = root
    for nd in node.lineage()[1:]:
        if nd.kind == "pullback":
            D = scion_pullback(D, nd.param("map"))
        elif nd.kind == "diagonal":
            D = scion_diagonal(D, nd.param("maps"))
        elif nd.kind == "factor":
            D = scion_factor(D, nd.param("embedding"), nd.param("witness"))
        elif nd.kind == "restrict":
            Z = nd.param("Z")
            if nd.param("fibred"):
                D = fibre_over_orbit(D, Z[0])
            else:
                D = restrict(D, Z if not D.is_finite else Z)
        else:
            raise ScionError(f"cannot replay node kind {nd.kind!r}")
    return D


def section_rows(D: DescentProblem, g: LaurentPoly):
    """Chart expression of ``g`` on every piece, one entry per diagonal factor.

    ``g`` is a polynomial on ``X``; the result is ``g∘p / u^{e}`` (its image
    in ``F``) restricted to each piece.
    """
    if D.atlas is None:
        raise ScionError("sections of F are computed from a blow-up atlas")
    out = []
    for pc in D.model.pieces:
        row = []
        for c, imgs in zip(pc.chart, pc.source_images):
            expr = D.atlas.charts[c].chart_expression(g)
            if any(e < 0 for exp in expr.terms for e in exp):
                raise PreconditionError("g is not in the integral closure: its chart expression has a pole")
            row.append(expr.substitute(list(imgs)) if imgs else expr)
        out.append(tuple(row))
    return out
