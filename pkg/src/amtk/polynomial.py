"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a tuple of ``(variable, exponent)`` pairs with positive
exponents, sorted by the canonical variable order ``x, y, p, z`` followed by
any other names alphabetically.  Zero coefficients are never stored, so two
equal polynomials always have identical term maps.

    >>> P = RatPoly.parse("x*y - 1")
    >>> Q = RatPoly.parse("y^2 - 1")
    >>> print(resultant(P, Q, "y"))
    x^2 - 1
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import reduce

from .errors import ParseError, PolynomialError

VAR_ORDER = ("x", "y", "p", "z")


def _var_key(name):
    return (VAR_ORDER.index(name), "") if name in VAR_ORDER else (len(VAR_ORDER), name)


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), key=lambda t: _var_key(t[0])))


def _mono_div(m1, m2):
    """``m1 / m2`` or None when ``m2`` does not divide ``m1``."""
    d = dict(m1)
    for v, e in m2:
        r = d.get(v, 0) - e
        if r < 0:
            return None
        if r:
            d[v] = r
        else:
            del d[v]
    return tuple(sorted(d.items(), key=lambda t: _var_key(t[0])))


def _degree(m):
    return sum(e for _, e in m)


class RatPoly:
    """Immutable polynomial over the rationals."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[m] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("RatPoly is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def const(cls, c) -> "RatPoly":
        return cls({(): c})

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "RatPoly":
        return cls({((name, exp),): 1}) if exp else cls.const(1)

    @classmethod
    def parse(cls, text: str) -> "RatPoly":
        return _PolyParser(text).parse()

    # -- inspection -------------------------------------------------------

    @property
    def variables(self) -> tuple[str, ...]:
        names = {v for m in self.terms for v, _ in m}
        return tuple(sorted(names, key=_var_key))

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def degree(self, var: str | None = None) -> int:
        """Degree in ``var`` (total degree if omitted); -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var is None:
            return max(_degree(m) for m in self.terms)
        return max(dict(m).get(var, 0) for m in self.terms)

    def coeffs(self, var: str) -> dict[int, "RatPoly"]:
        """Coefficients as polynomials in the remaining variables, keyed by power of ``var``."""
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.pop(var, 0)
            out.setdefault(e, {})[tuple(sorted(d.items(), key=lambda t: _var_key(t[0])))] = c
        return {e: RatPoly(t) for e, t in out.items()}

    def grlex_key(self, m, names=None):
        names = names or self.variables
        d = dict(m)
        return (_degree(m), tuple(d.get(v, 0) for v in names))

    def lex_key(self, m, names=None):
        names = names or self.variables
        d = dict(m)
        return tuple(d.get(v, 0) for v in names)

    def leading_term(self, order="grlex"):
        names = self.variables
        key = self.grlex_key if order == "grlex" else self.lex_key
        m = max(self.terms, key=lambda t: key(t, names))
        return m, self.terms[m]

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, o):
        if isinstance(o, RatPoly):
            return o
        if isinstance(o, (int, Fraction)):
            return RatPoly.const(o)
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        t = dict(self.terms)
        for m, c in o.terms.items():
            t[m] = t.get(m, 0) + c
        return RatPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return RatPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                t[m] = t.get(m, 0) + c1 * c2
        return RatPoly(t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise PolynomialError("negative power of a polynomial")
        result, base = RatPoly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def diff(self, var: str) -> "RatPoly":
        t = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(var, 0)
            if e:
                if e == 1:
                    del d[var]
                else:
                    d[var] = e - 1
                t[tuple(sorted(d.items(), key=lambda q: _var_key(q[0])))] = c * e
        return RatPoly(t)

    def subs(self, var: str, value: "RatPoly") -> "RatPoly":
        out = RatPoly()
        for e, c in self.coeffs(var).items():
            out = out + c * value ** e
        return out

    def rename(self, mapping: dict[str, str]) -> "RatPoly":
        t = {}
        for m, c in self.terms.items():
            d = {}
            for v, e in m:
                w = mapping.get(v, v)
                d[w] = d.get(w, 0) + e
            t[tuple(sorted(d.items(), key=lambda q: _var_key(q[0])))] = c
        return RatPoly(t)

    def evaluate(self, point: dict[str, float]) -> tuple[float, float]:
        """Float value at ``point`` and the largest absolute monomial contribution."""
        total, biggest = 0.0, 0.0
        for m, c in self.terms.items():
            term = float(c)
            for v, e in m:
                term *= float(point[v]) ** e
            total += term
            biggest = max(biggest, abs(term))
        return total, biggest

    # -- normal forms -----------------------------------------------------

    def content(self) -> Fraction:
        """Positive rational ``c`` with ``self / c`` integral and primitive."""
        if not self.terms:
            return Fraction(0)
        cs = list(self.terms.values())
        num = reduce(math.gcd, (abs(c.numerator) for c in cs))
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in cs))
        return Fraction(num, den)

    def normalized(self) -> "RatPoly":
        """Integer coefficients with gcd 1 and positive grlex-leading coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if self.leading_term()[1] < 0:
            c = -c
        return RatPoly({m: v / c for m, v in self.terms.items()})

    # -- text -------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.variables
        parts = []
        for m in sorted(self.terms, key=lambda t: self.grlex_key(t, names), reverse=True):
            c = self.terms[m]
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"RatPoly({str(self)!r})"


# --------------------------------------------------------------------------
# text format
# --------------------------------------------------------------------------

_PTOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


class _PolyParser:
    """Terms like ``c*x^i*y^j`` joined by ``+``/``-``; parentheses and ``a/b`` allowed."""

    def __init__(self, text):
        self.text = text
        self.toks = []
        pos = 0
        while text[pos:].strip():
            m = _PTOKEN.match(text, pos)
            if not m:
                off = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[off]!r}", off)
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.toks.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self):
        if len(self.toks) == 1:
            raise ParseError("empty polynomial", 0)
        p = self.sum()
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", off)
        return p

    def sum(self):
        p = self.product()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.product()
            p = p + q if op == "+" else p - q
        return p

    def product(self):
        p = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            kind, val, off = self.peek()
            q = self.unary()
            if op == "/":
                if not q.is_constant() or q.is_zero():
                    raise ParseError("division only by nonzero constants", off)
                q = RatPoly.const(1 / q.terms[()])
            p = p * q
        return p

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, off = self.take()
            if kind != "int":
                raise ParseError("exponent must be a nonnegative integer", off)
            return base ** int(val)
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "int":
            return RatPoly.const(int(val))
        if kind == "name":
            return RatPoly.var(val)
        if (kind, val) == ("op", "("):
            p = self.sum()
            k2, v2, o2 = self.take()
            if v2 != ")":
                raise ParseError("expected ')'", o2)
            return p
        raise ParseError("unexpected " + ("end of input" if kind == "end" else repr(val)), off)


# --------------------------------------------------------------------------
# division, gcd
# --------------------------------------------------------------------------


def divmod_poly(a: RatPoly, b: RatPoly) -> tuple[RatPoly, RatPoly]:
    """Multivariate division of ``a`` by ``b`` in lex order.

    With a single divisor the remainder is zero exactly when ``b`` divides ``a``.
    """
    if b.is_zero():
        raise PolynomialError("division by the zero polynomial")
    names = tuple(sorted(set(a.variables) | set(b.variables), key=_var_key))
    lm_b = max(b.terms, key=lambda t: b.lex_key(t, names))
    lc_b = b.terms[lm_b]
    q, r = {}, {}
    rest = dict(a.terms)
    while rest:
        m = max(rest, key=lambda t: b.lex_key(t, names))
        c = rest[m]
        qm = _mono_div(m, lm_b)
        if qm is None:
            r[m] = c
            del rest[m]
            continue
        f = c / lc_b
        q[qm] = q.get(qm, 0) + f
        for mb, cb in b.terms.items():
            mm = _mono_mul(qm, mb)
            v = rest.get(mm, 0) - f * cb
            if v:
                rest[mm] = v
            else:
                rest.pop(mm, None)
    return RatPoly(q), RatPoly(r)


def exact_div(a: RatPoly, b: RatPoly) -> RatPoly:
    q, r = divmod_poly(a, b)
    if not r.is_zero():
        raise PolynomialError(f"{b} does not divide {a}")
    return q


def divides(b: RatPoly, a: RatPoly) -> bool:
    return divmod_poly(a, b)[1].is_zero()


def prem(a: RatPoly, b: RatPoly, var: str) -> RatPoly:
    """Pseudo-remainder of ``a`` by ``b`` with respect to ``var``."""
    db = b.degree(var)
    if db < 0:
        raise PolynomialError("pseudo-division by zero")
    lc = b.coeffs(var)[db]
    r = a
    e = max(a.degree(var) - db + 1, 0)
    while not r.is_zero() and r.degree(var) >= db:
        dr = r.degree(var)
        lr = r.coeffs(var)[dr]
        r = lc * r - lr * RatPoly.var(var, dr - db) * b
        e -= 1
    return lc ** max(e, 0) * r


def content_in(a: RatPoly, var: str) -> RatPoly:
    """Gcd of the coefficients of ``a`` viewed as a polynomial in ``var``."""
    return reduce(gcd, a.coeffs(var).values(), RatPoly())


def primitive_part(a: RatPoly, var: str) -> RatPoly:
    if a.is_zero():
        return a
    return exact_div(a, content_in(a, var)).normalized()


def gcd(a: RatPoly, b: RatPoly) -> RatPoly:
    """Normalized gcd over Q via recursive primitive remainder sequences."""
    if a.is_zero():
        return b.normalized()
    if b.is_zero():
        return a.normalized()
    names = sorted(set(a.variables) | set(b.variables), key=_var_key)
    if not names:
        return RatPoly.const(1)
    var = names[-1]
    if a.degree(var) == 0:
        return gcd(a, content_in(b, var))
    if b.degree(var) == 0:
        return gcd(content_in(a, var), b)
    ca, cb = content_in(a, var), content_in(b, var)
    c = gcd(ca, cb)
    pa, pb = exact_div(a, ca), exact_div(b, cb)
    if pa.degree(var) < pb.degree(var):
        pa, pb = pb, pa
    while True:
        r = prem(pa, pb, var)
        if r.is_zero():
            g = pb
            break
        if r.degree(var) == 0:
            g = RatPoly.const(1)
            break
        pa, pb = pb, primitive_part(r, var)
    if g.degree(var) > 0:
        g = primitive_part(g, var)
    return (c * g).normalized()


def squarefree_factors(a: RatPoly, var: str) -> list[tuple[RatPoly, int]]:
    """Yun decomposition ``a = content * prod(a_i ** i)`` with respect to ``var``.

    ``a`` should be primitive in ``var``; only factors of positive degree in
    ``var`` are returned, each normalized, with its multiplicity.
    """
    out = []
    da = a.diff(var)
    g = gcd(a, da)
    b = exact_div(a, g)
    c = exact_div(da, g)
    i = 1
    while b.degree(var) > 0:
        d = c - b.diff(var)
        h = gcd(b, d)
        if h.degree(var) > 0:
            out.append((h, i))
        b = exact_div(b, h)
        c = exact_div(d, h)
        i += 1
    return out


# --------------------------------------------------------------------------
# resultants
# --------------------------------------------------------------------------


def sylvester_matrix(P: RatPoly, Q: RatPoly, var: str) -> list[list[RatPoly]]:
    m, n = P.degree(var), Q.degree(var)
    cp, cq = P.coeffs(var), Q.coeffs(var)
    zero = RatPoly()
    size = m + n
    rows = []
    for i in range(n):
        row = [zero] * size
        for k in range(m + 1):
            row[i + k] = cp.get(m - k, zero)
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k in range(n + 1):
            row[i + k] = cq.get(n - k, zero)
        rows.append(row)
    return rows


def bareiss_det(matrix: list[list[RatPoly]]) -> RatPoly:
    """Fraction-free determinant; every division is exact."""
    M = [list(r) for r in matrix]
    n = len(M)
    if n == 0:
        return RatPoly.const(1)
    sign = 1
    prev = RatPoly.const(1)
    for k in range(n - 1):
        if M[k][k].is_zero():
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return RatPoly()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = exact_div(M[i][j] * M[k][k] - M[i][k] * M[k][j], prev)
        prev = M[k][k]
    return M[n - 1][n - 1] if sign > 0 else -M[n - 1][n - 1]


def resultant(P: RatPoly, Q: RatPoly, var: str, normalize: bool = True) -> RatPoly:
    """Sylvester resultant of ``P`` and ``Q`` with respect to ``var``."""
    if P.is_zero() or Q.is_zero():
        raise PolynomialError("resultant of the zero polynomial")
    if P.degree(var) < 1 or Q.degree(var) < 1:
        raise PolynomialError(f"resultant needs positive degree in {var!r}")
    det = bareiss_det(sylvester_matrix(P, Q, var))
    return det.normalized() if normalize else det
