"""Exact multivariate Laurent polynomials over the Gaussian rationals.

Everything here is immutable. A ``LaurentPoly`` carries its ordered variable
list and a map from integer exponent tuples to nonzero ``Scalar`` values; two
polynomials compare equal iff both of those agree.
"""
from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import (
    DimensionCapError,
    ParseError,
    PoleError,
    UnknownVariableError,
    VariableMismatchError,
    ZeroIdealError,
)

MAX_VARS = 3


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot make an exact rational from {x!r}")


class Scalar:
    """Gaussian rational ``re + im*i`` with exact arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact")
        return cls(x)

    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if not self.im and not o.im:
            return Scalar(self.re * o.re)
        return Scalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if not o:
            raise ZeroDivisionError("division by zero Scalar")
        if not o.im:
            return Scalar(self.re / o.re, self.im / o.re)
        n = o.abs2()
        return self * Scalar(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __pow__(self, k: int):
        if k < 0:
            return (Scalar(1) / self) ** (-k)
        out = Scalar(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def sort_key(self):
        return (self.re, self.im)

    def is_real(self) -> bool:
        return not self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if not self.im:
            return _fmt_frac(self.re)
        if not self.re:
            return f"{_fmt_frac(self.im)}*i"
        sign = "-" if self.im < 0 else "+"
        return f"({_fmt_frac(self.re)} {sign} {_fmt_frac(abs(self.im))}*i)"

    def to_json(self):
        """``"p/q"`` for real values, ``{"re", "im"}`` otherwise."""
        if not self.im:
            return frac_to_str(self.re)
        return {"re": frac_to_str(self.re), "im": frac_to_str(self.im)}

    @classmethod
    def from_json(cls, obj) -> "Scalar":
        if isinstance(obj, dict):
            return cls(Fraction(obj["re"]), Fraction(obj["im"]))
        return cls(Fraction(obj))


def _coerce_or_none(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar(x)
    return None


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def frac_to_str(q: Fraction) -> str:
    """Always ``p/q`` (denominator kept even when 1), as used in JSON."""
    return f"{q.numerator}/{q.denominator}"


ZERO = Scalar(0)
ONE = Scalar(1)
I_UNIT = Scalar(0, 1)


def grlex_key(exp: Sequence[int]):
    return (sum(exp), tuple(exp))


def _vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


class LaurentPoly:
    """Sparse Laurent polynomial with Gaussian-rational coefficients."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Sequence[str], terms: Mapping | None = None):
        vs = tuple(vars)
        clean = {}
        n = len(vs)
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise VariableMismatchError(
                    f"exponent {exp} does not match variables {vs}")
            c = Scalar.coerce(c)
            if c:
                clean[exp] = c
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def _raw(cls, vars, terms):
        # terms already canonical; skip validation in hot paths
        obj = object.__new__(cls)
        object.__setattr__(obj, "vars", vars)
        object.__setattr__(obj, "terms", terms)
        object.__setattr__(obj, "_hash", None)
        return obj

    # constructors
    @classmethod
    def zero(cls, vars):
        return cls._raw(tuple(vars), {})

    @classmethod
    def const(cls, vars, c=1):
        vs = tuple(vars)
        return cls(vs, {(0,) * len(vs): c})

    @classmethod
    def one(cls, vars):
        return cls.const(vars, 1)

    @classmethod
    def monomial(cls, vars, exp, c=1):
        return cls(vars, {tuple(exp): c})

    @classmethod
    def var(cls, vars, name):
        vs = tuple(vars)
        if name not in vs:
            raise UnknownVariableError(f"unknown variable {name!r}")
        exp = tuple(1 if v == name else 0 for v in vs)
        return cls(vs, {exp: 1})

    # basic queries
    @property
    def nvars(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_polynomial(self) -> bool:
        return all(e >= 0 for exp in self.terms for e in exp)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * self.nvars, ZERO)

    def sorted_terms(self, reverse=True):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=reverse)

    def leading_term(self):
        if not self.terms:
            return None
        return max(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def support(self):
        return sorted(self.terms, key=grlex_key, reverse=True)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def min_exponents(self):
        """Componentwise minimum exponent over the support."""
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(col) for col in zip(*self.terms))

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    # arithmetic
    def _check(self, other):
        if not isinstance(other, LaurentPoly):
            return LaurentPoly.const(self.vars, other)
        if other.vars != self.vars:
            raise VariableMismatchError(f"variables {self.vars} vs {other.vars}")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        other = self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _vec_add(e1, e2)
                s = out.get(e)
                s = c1 * c2 if s is None else s + c1 * c2
                out[e] = s
        return LaurentPoly._raw(self.vars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c):
        c = Scalar.coerce(c)
        if not c:
            return LaurentPoly.zero(self.vars)
        return LaurentPoly._raw(self.vars, {e: v * c for e, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative powers only for monomials")
            (e, c), = self.terms.items()
            return LaurentPoly(self.vars, {tuple(k * x for x in e): Scalar(1) / c ** (-k)})
        out = LaurentPoly.one(self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, exp):
        """Multiply by the monomial ``x^exp``."""
        exp = tuple(exp)
        return LaurentPoly._raw(self.vars, {_vec_add(e, exp): c for e, c in self.terms.items()})

    def conj(self):
        return LaurentPoly._raw(self.vars, {e: c.conj() for e, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction, Scalar)):
            return self.terms == LaurentPoly.const(self.vars, other).terms
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.vars, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    # evaluation and substitution
    def evaluate(self, point) -> Scalar:
        pt = [Scalar.coerce(p) for p in point]
        if len(pt) != self.nvars:
            raise VariableMismatchError(f"point of length {len(pt)} for {self.nvars} variables")
        total = ZERO
        for exp, c in self.terms.items():
            v = c
            for a, e in zip(pt, exp):
                if e == 0:
                    continue
                if e < 0 and not a:
                    raise PoleError(f"negative exponent at zero coordinate in {exp}")
                v = v * a ** e
            total = total + v
        return total

    def restrict_zero(self, idx: Iterable[int]):
        """Set the coordinates in ``idx`` to zero.

        Terms with a positive exponent there vanish; a negative exponent is a
        pole and raises.
        """
        idx = list(idx)
        out = {}
        for e, c in self.terms.items():
            if any(e[k] < 0 for k in idx):
                raise PoleError(f"term {e} has a pole on the zero set {idx}")
            if all(e[k] == 0 for k in idx):
                out[e] = c
        return LaurentPoly._raw(self.vars, out)

    def pullback(self, new_vars, rays):
        """Substitute ``x_j = prod_k u_k^rays[k][j]`` (a monomial map)."""
        nv = tuple(new_vars)
        if len(rays) != len(nv) or any(len(r) != self.nvars for r in rays):
            raise VariableMismatchError("ray matrix shape does not match variables")
        out: dict = {}
        for e, c in self.terms.items():
            ne = tuple(sum(r[j] * e[j] for j in range(self.nvars)) for r in rays)
            s = out.get(ne)
            out[ne] = c if s is None else s + c
        return LaurentPoly._raw(nv, {e: c for e, c in out.items() if c})

    def substitute(self, images: Sequence["LaurentPoly"]):
        """Compose with ``x_j -> images[j]``; images share one variable list."""
        if len(images) != self.nvars:
            raise VariableMismatchError("need one image per variable")
        nv = images[0].vars
        out = LaurentPoly.zero(nv)
        for e, c in self.terms.items():
            t = LaurentPoly.const(nv, c)
            for img, k in zip(images, e):
                if k:
                    t = t * img ** k
            out = out + t
        return out

    def rename(self, new_vars):
        nv = tuple(new_vars)
        if len(nv) != self.nvars:
            raise VariableMismatchError("rename needs the same number of variables")
        return LaurentPoly._raw(nv, dict(self.terms))

    def embed(self, new_vars, positions):
        """Place this polynomial into a larger variable list."""
        nv = tuple(new_vars)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(nv)
            for k, p in enumerate(positions):
                ne[p] = e[k]
            out[tuple(ne)] = c
        return LaurentPoly._raw(nv, out)

    def drop_vars(self, keep):
        """Project exponent vectors onto ``keep`` (caller ensures no collisions matter)."""
        keep = list(keep)
        nv = tuple(self.vars[k] for k in keep)
        out: dict = {}
        for e, c in self.terms.items():
            ne = tuple(e[k] for k in keep)
            s = out.get(ne)
            out[ne] = c if s is None else s + c
        return LaurentPoly._raw(nv, {e: c for e, c in out.items() if c})

    def monomial_content(self):
        """Componentwise minimal exponent; dividing by it leaves no common monomial factor."""
        return self.min_exponents()

    def exact_div(self, d: "LaurentPoly"):
        """Return ``q`` with ``q*d == self`` or ``None`` if no Laurent quotient exists."""
        d = self._check(d)
        if not d:
            raise ZeroDivisionError("division by zero polynomial")
        if not self:
            return LaurentPoly.zero(self.vars)
        # normalise both to genuine polynomials with no monomial content
        dm = d.min_exponents()
        nm = self.min_exponents()
        dd = d.shift(tuple(-x for x in dm))
        nn = self.shift(tuple(-x for x in nm))
        q = LaurentPoly.zero(self.vars)
        rem = nn
        lt_e, lt_c = dd.leading_term()
        while rem:
            e, c = rem.leading_term()
            qe = _vec_sub(e, lt_e)
            if any(x < 0 for x in qe):
                return None
            t = LaurentPoly._raw(self.vars, {qe: c / lt_c})
            q = q + t
            rem = rem - t * dd
        return q.shift(_vec_sub(nm, dm))

    # printing
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"LaurentPoly({list(self.vars)}, {format_poly(self)!r})"

    def to_json(self):
        return {"vars": list(self.vars), "text": format_poly(self)}

    @classmethod
    def from_json(cls, obj):
        return parse_poly(obj["text"], obj["vars"], laurent=True)


def _fmt_monomial(vars, exp):
    parts = []
    for v, e in zip(vars, exp):
        if e == 0:
            continue
        parts.append(v if e == 1 else f"{v}^{e}")
    return "*".join(parts)


def format_poly(p: LaurentPoly) -> str:
    if not p.terms:
        return "0"
    out = []
    for idx, (exp, c) in enumerate(p.sorted_terms()):
        mono = _fmt_monomial(p.vars, exp)
        neg = False
        if c.is_real():
            neg = c.re < 0
            mag = Scalar(abs(c.re))
        elif not c.re:
            neg = c.im < 0
            mag = Scalar(0, abs(c.im))
        else:
            mag = c
        if mono:
            if mag == ONE:
                body = mono
            else:
                body = f"{mag}*{mono}"
        else:
            body = str(mag)
        if idx == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text):
    pos = 0
    toks = []
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2) is not None:
            toks.append(("id", m.group(2), start))
        else:
            ch = m.group(3)
            if ch == "−":
                ch = "-"
            if ch not in "+-*^/()":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            toks.append((ch, ch, start))
        pos = m.end()
    toks.append(("end", None, n))
    return toks


class _Parser:
    def __init__(self, text, vars, laurent):
        self.text = text
        self.vars = tuple(vars)
        self.laurent = laurent
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        t = self.toks[self.i]
        if kind is not None and t[0] != kind:
            raise ParseError(f"expected {kind!r}, got {t[1]!r}", t[2], self.text)
        self.i += 1
        return t

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0, self.text)
        p = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", t[2], self.text)
        return p

    def expr(self):
        if self.peek()[0] in "+-":
            sign = self.take()[0]
            p = self.term()
            if sign == "-":
                p = -p
        else:
            p = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.factor()
        while self.peek()[0] == "*":
            self.take()
            p = p * self.factor()
        return p

    def factor(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "-":
                t = self.take()
                if not self.laurent:
                    raise ParseError("negative exponent not allowed", t[2], self.text)
                neg = True
            t = self.peek()
            if t[0] != "num":
                raise ParseError("exponent must be an integer literal", t[2], self.text)
            self.take()
            k = -t[1] if neg else t[1]
            try:
                return base ** k
            except ValueError as exc:
                raise ParseError(str(exc), t[2], self.text) from None
        return base

    def atom(self):
        t = self.peek()
        kind = t[0]
        if kind == "num":
            self.take()
            val = Fraction(t[1])
            if self.peek()[0] == "/":
                self.take()
                d = self.take("num")
                if d[1] == 0:
                    raise ParseError("zero denominator", d[2], self.text)
                val = Fraction(t[1], d[1])
            return LaurentPoly.const(self.vars, val)
        if kind == "id":
            self.take()
            name = t[1]
            if name in self.vars:
                return LaurentPoly.var(self.vars, name)
            if name == "i":
                return LaurentPoly.const(self.vars, I_UNIT)
            raise UnknownVariableError(f"unknown variable {name!r}", t[2], self.text)
        if kind == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        raise ParseError(f"unexpected token {t[1]!r}", t[2], self.text)


def check_vars(vars):
    vs = tuple(vars)
    seen = set()
    for v in vs:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
            raise ParseError(f"invalid variable name {v!r}")
        if v == "i":
            raise ParseError("'i' is reserved for the imaginary unit")
        if v in seen:
            raise ParseError(f"duplicate variable {v!r}")
        seen.add(v)
    return vs


def parse_poly(text: str, vars, laurent: bool = False) -> LaurentPoly:
    """Parse ``text`` into a canonical LaurentPoly over ``vars``."""
    vs = check_vars(vars)
    return _Parser(text, vs, laurent).parse()


def arith(op: str, p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    if p.vars != q.vars:
        raise VariableMismatchError(f"variables {p.vars} vs {q.vars}")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def monomial_divide(p: LaurentPoly, m) -> LaurentPoly:
    return p.shift(tuple(-x for x in m))


def evaluate(p: LaurentPoly, point) -> Scalar:
    return p.evaluate(point)


# --------------------------------------------------------------------------
# monomial ideals

def divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


class MonomialIdeal:
    """Monomial ideal kept as its unique minimal generating set."""

    __slots__ = ("vars", "gens")

    def __init__(self, vars, gens):
        vs = tuple(vars)
        gs = []
        for g in gens:
            g = tuple(int(x) for x in g)
            if len(g) != len(vs):
                raise VariableMismatchError(f"generator {g} does not match {vs}")
            if any(x < 0 for x in g):
                raise ValueError(f"generator {g} has a negative exponent")
            gs.append(g)
        if not gs:
            raise ZeroIdealError("the zero ideal has no blow-up")
        uniq = list(dict.fromkeys(gs))
        minimal = [g for g in uniq if not any(h != g and divides(h, g) for h in uniq)]
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "gens", tuple(minimal))

    def __setattr__(self, name, value):
        raise AttributeError("MonomialIdeal is immutable")

    @property
    def nvars(self):
        return len(self.vars)

    @property
    def rank(self):
        return len(self.gens)

    def contains_monomial(self, exp) -> bool:
        return any(divides(g, exp) for g in self.gens)

    def contains(self, p: LaurentPoly) -> bool:
        return all(self.contains_monomial(e) for e in p.terms)

    def generator_polys(self):
        return [LaurentPoly.monomial(self.vars, g) for g in self.gens]

    def is_unit(self):
        return any(not any(g) for g in self.gens)

    def vanishing_supports(self):
        """Zero sets S (index tuples) whose torus orbit lies in V(I)."""
        n = self.nvars
        out = []
        for k in range(1, n + 1):
            for S in combinations(range(n), k):
                if all(any(g[j] > 0 for j in S) for g in self.gens):
                    out.append(S)
        return out

    def is_m_primary(self):
        n = self.nvars
        if self.is_unit():
            return False
        return all(any(g[i] > 0 and all(g[j] == 0 for j in range(n) if j != i) for g in self.gens)
                   for i in range(n))

    def permuted(self, perm):
        """Ideal after renaming variable k to position perm[k]."""
        n = self.nvars
        gens = []
        for g in self.gens:
            ng = [0] * n
            for k in range(n):
                ng[perm[k]] = g[k]
            gens.append(tuple(ng))
        nv = [None] * n
        for k in range(n):
            nv[perm[k]] = self.vars[k]
        return MonomialIdeal(nv, gens)

    def __eq__(self, other):
        return isinstance(other, MonomialIdeal) and self.vars == other.vars and self.gens == other.gens

    def __hash__(self):
        return hash((self.vars, self.gens))

    def __str__(self):
        return "(" + ", ".join(_fmt_monomial(self.vars, g) or "1" for g in self.gens) + ")"

    __repr__ = __str__


def parse_generators(text: str, vars):
    """Parse a comma-separated generator list, keeping order and repeats."""
    vs = check_vars(vars)
    items = [s for s in text.split(",")]
    out = []
    for s in items:
        if not s.strip():
            raise ParseError("empty generator in list", None, text)
        p = parse_poly(s, vs)
        if not p.is_monomial():
            raise ParseError(f"generator {s.strip()!r} is not a monomial", None, text)
        out.append(p)
    return out


def parse_ideal(text: str, vars) -> MonomialIdeal:
    vs = check_vars(vars)
    if len(vs) > MAX_VARS:
        raise DimensionCapError(f"at most {MAX_VARS} variables are supported, got {len(vs)}")
    gens = parse_generators(text, vs)
    return MonomialIdeal(vs, [next(iter(g.terms)) for g in gens])
