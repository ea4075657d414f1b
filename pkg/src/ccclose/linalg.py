"""Exact linear algebra: Gaussian rationals and Laurent-polynomial matrices.

Matrices are plain lists of rows. Over ``Scalar`` we eliminate with exact
division; over ``LaurentPoly`` we use fraction-free elimination and strip the
monomial content of every row to keep entries small.
"""
from __future__ import annotations

from dataclasses import dataclass

from .poly import ONE, ZERO, LaurentPoly, Scalar


# ---------------------------------------------------------------- Scalar field

def to_scalar_matrix(rows):
    return [[Scalar.coerce(x) for x in r] for r in rows]


def rref(rows):
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in to_scalar_matrix(rows)]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = ONE / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    return len(rref(rows)[1]) if rows else 0


def det(rows) -> Scalar:
    m = [list(r) for r in to_scalar_matrix(rows)]
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    sign = ONE
    out = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return ZERO
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        p = m[c][c]
        out = out * p
        inv = ONE / p
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return sign * out


def solve(A, b):
    """One solution of ``A x = b`` (free variables set to zero) or ``None``."""
    if not A:
        return []
    ncols = len(A[0])
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    m, piv = rref(aug)
    if ncols in piv:
        return None
    x = [ZERO] * ncols
    for row, c in zip(m, piv):
        x[c] = row[-1]
    return x


def nullspace(A):
    if not A:
        return []
    ncols = len(A[0])
    m, piv = rref(A)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, c in zip(m, piv):
            v[c] = -row[f]
        basis.append(v)
    return basis


def transpose(rows):
    return [list(col) for col in zip(*rows)]


# ------------------------------------------------------- rational functions

@dataclass(frozen=True)
class RationalFunction:
    """``num/den`` in the fraction field of a Laurent polynomial ring."""

    num: LaurentPoly
    den: LaurentPoly

    def __post_init__(self):
        if not self.den:
            raise ZeroDivisionError("zero denominator")

    @classmethod
    def of(cls, p: LaurentPoly):
        return cls(p, LaurentPoly.one(p.vars))

    def laurent(self):
        """The Laurent polynomial this equals, or ``None`` if it has a genuine pole."""
        return self.num.exact_div(self.den)

    def is_zero(self):
        return not self.num

    def evaluate(self, point):
        d = self.den.evaluate(point)
        if not d:
            raise ZeroDivisionError("denominator vanishes at point")
        return self.num.evaluate(point) / d

    def __str__(self):
        q = self.laurent()
        if q is not None:
            return str(q)
        return f"({self.num})/({self.den})"


# ------------------------------------------------ fraction-free elimination

def _strip_content(row):
    nz = [p for p in row if p]
    if not nz:
        return row
    vars_ = nz[0].vars
    mins = [p.min_exponents() for p in nz]
    content = tuple(min(col) for col in zip(*mins)) if vars_ else ()
    if any(content):
        neg = tuple(-x for x in content)
        row = [p.shift(neg) if p else p for p in row]
    return row


def _pivot_key(p: LaurentPoly):
    # prefer monomial pivots: they never vanish on a torus orbit
    return (0 if p.is_monomial() else 1, len(p.terms))


def ff_echelon(rows, ncols=None):
    """Fraction-free row echelon form of a LaurentPoly matrix.

    Returns ``(rows, pivot_cols)``. Every pivot is stored in its row; rows are
    divided by their monomial content after each step.
    """
    m = [list(r) for r in rows]
    if not m:
        return m, []
    if ncols is None:
        ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        cands = [i for i in range(r, len(m)) if m[i][c]]
        if not cands:
            continue
        piv = min(cands, key=lambda i: (_pivot_key(m[i][c]), i))
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, len(m)):
            a = m[i][c]
            if a:
                m[i] = _strip_content([p * x - a * y for x, y in zip(m[i], m[r])])
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def ff_rank(rows) -> int:
    if not rows:
        return 0
    return len(ff_echelon(rows)[1])


def ff_solve_unique(A, b):
    """Solve ``A x = b`` over the fraction field when ``A`` has full column rank.

    Returns a list of ``RationalFunction`` or ``None`` if the system is
    inconsistent. Also returns the pivots used, for degeneracy checks.
    """
    if not A:
        return [], []
    ncols = len(A[0])
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    m, piv = ff_echelon(aug, ncols + 1)
    if ncols in piv:
        return None, []
    if len(piv) != ncols:
        raise ValueError("matrix does not have full column rank")
    rows = m[:ncols]
    # back substitution, fraction-free
    for k in range(ncols - 1, -1, -1):
        pk = rows[k][k]
        for i in range(k):
            a = rows[i][k]
            if a:
                rows[i] = _strip_content([pk * x - a * y for x, y in zip(rows[i], rows[k])])
    sol = []
    pivots_used = []
    for k in range(ncols):
        num, den = rows[k][-1], rows[k][k]
        pivots_used.append(den)
        q = num.exact_div(den) if num else LaurentPoly.zero(den.vars)
        if q is not None:
            sol.append(RationalFunction.of(q))
        else:
            sol.append(RationalFunction(num, den))
    return sol, pivots_used
