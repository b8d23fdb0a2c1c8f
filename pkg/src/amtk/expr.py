"""Univariate expressions: parsing, printing, and second-order forward-mode AD.

Grammar (``^`` binds tighter than unary minus, which binds tighter than
``*``/``/``, which bind tighter than ``+``/``-``; ``^`` is right-associative)::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := ("-")? power
    power  := atom ("^" factor)?
    atom   := number | "x" | "pi" | "e" | ident "(" expr ")" | "(" expr ")"
    ident  := sin|cos|tan|exp|log|sqrt|atan|abs

Example:
    >>> e = parse("sin(x)/x")
    >>> j = eval_jet2(e, 1.0)
    >>> round(j.v, 9), round(j.d1, 9)
    (0.841470985, -0.301168679)
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import DomainError, ParseError, UnknownIdentifierError

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "atan", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Number:
    text: str  # exact decimal literal as written

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class Variable:
    def __str__(self):
        return "x"


@dataclass(frozen=True)
class NamedConstant:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg:
    arg: "Expr"

    def __str__(self):
        return "-" + _wrap(self.arg, _PREC_POW)


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"

    def __str__(self):
        return f"{self.func}({self.arg})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __str__(self):
        if self.op == "^":
            return f"{_wrap(self.left, _PREC_ATOM)}^{_wrap(self.right, _PREC_NEG)}"
        prec = _precedence(self)
        # left-associative: the right operand needs parentheses at equal precedence
        return f"{_wrap(self.left, prec)} {self.op} {_wrap(self.right, prec + 1)}"


Expr = Union[Number, Variable, NamedConstant, Neg, Call, BinOp]

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _precedence(e):
    if isinstance(e, BinOp):
        return {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL, "^": _PREC_POW}[e.op]
    if isinstance(e, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def _wrap(e, min_prec):
    s = str(e)
    return s if _precedence(e) >= min_prec else f"({s})"


def to_string(e: Expr) -> str:
    return str(e)


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, off = self.take()
        if val != value or kind not in ("op",):
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", off)

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.power())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.factor())
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            return Number(val)
        if kind == "ident":
            if val == "x":
                return Variable()
            if val in CONSTANTS:
                return NamedConstant(val)
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            raise UnknownIdentifierError(f"unknown identifier {val!r}", off)
        if (kind, val) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", off)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises ParseError (with the character offset) on malformed input and
    UnknownIdentifierError for names outside the grammar.
    """
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    p = _Parser(text)
    node = p.expr()
    kind, val, off = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing {val!r}", off)
    return node


def _integer_exponent(e):
    """Literal integer exponent (optionally negated), else None."""
    sign = 1
    if isinstance(e, Neg):
        sign, e = -1, e.arg
    if isinstance(e, Number) and e.text.isdigit():
        return sign * int(e.text)
    return None


# --------------------------------------------------------------------------
# Plain float evaluation (independent of the jet arithmetic)
# --------------------------------------------------------------------------


def evaluate(e: Expr, x: float) -> float:
    """Value of ``e`` at ``x`` using plain float arithmetic."""
    try:
        return _eval(e, float(x))
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(str(exc), e, x) from None


def _eval(e, x):
    if isinstance(e, Number):
        return float(e.text)
    if isinstance(e, Variable):
        return x
    if isinstance(e, NamedConstant):
        return CONSTANTS[e.name]
    if isinstance(e, Neg):
        return -_eval(e.arg, x)
    if isinstance(e, Call):
        u = _eval(e.arg, x)
        if e.func == "log" and u <= 0:
            raise DomainError("log of non-positive value", e, x)
        if e.func == "sqrt" and u < 0:
            raise DomainError("sqrt of negative value", e, x)
        if e.func == "abs":
            return abs(u)
        return getattr(math, e.func)(u)
    a = _eval(e.left, x)
    if e.op == "^":
        n = _integer_exponent(e.right)
        if n is not None:
            if n < 0 and a == 0:
                raise DomainError("division by zero", e, x)
            return a ** n
        b = _eval(e.right, x)
        if a <= 0:
            raise DomainError("non-integer power of non-positive base", e, x)
        return a ** b
    b = _eval(e.right, x)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if b == 0:
        raise DomainError("division by zero", e, x)
    return a / b


# --------------------------------------------------------------------------
# Second-order jets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Jet2:
    """Value with first and second derivative, ``(v, d1, d2)``."""

    v: float
    d1: float = 0.0
    d2: float = 0.0

    @classmethod
    def const(cls, c):
        return cls(float(c), 0.0, 0.0)

    @classmethod
    def var(cls, x):
        return cls(float(x), 1.0, 0.0)

    def __iter__(self):
        return iter((self.v, self.d1, self.d2))

    def __neg__(self):
        return Jet2(-self.v, -self.d1, -self.d2)

    def __add__(self, o):
        o = _lift(o)
        return Jet2(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __sub__(self, o):
        o = _lift(o)
        return Jet2(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)

    def __rsub__(self, o):
        return _lift(o) - self

    def __mul__(self, o):
        o = _lift(o)
        return Jet2(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _lift(o)
        if o.v == 0:
            raise ZeroDivisionError("division by zero")
        # from self = q * o
        q = self.v / o.v
        q1 = (self.d1 - q * o.d1) / o.v
        q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.v
        return Jet2(q, q1, q2)

    def __rtruediv__(self, o):
        return _lift(o) / self

    def chain(self, f0, f1, f2):
        """Compose with an outer function whose value/derivatives at ``self.v`` are given."""
        return Jet2(f0, f1 * self.d1, f2 * self.d1 * self.d1 + f1 * self.d2)

    def ipow(self, n: int) -> "Jet2":
        """Integer power by repeated squaring."""
        if n < 0:
            return 1.0 / self.ipow(-n)
        result, base = Jet2.const(1.0), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result


def _lift(o):
    return o if isinstance(o, Jet2) else Jet2.const(o)


def _apply(func, u):
    v = u.v
    if func == "sin":
        s, c = math.sin(v), math.cos(v)
        return u.chain(s, c, -s)
    if func == "cos":
        s, c = math.sin(v), math.cos(v)
        return u.chain(c, -s, -c)
    if func == "tan":
        t = math.tan(v)
        sec2 = 1.0 + t * t
        return u.chain(t, sec2, 2.0 * t * sec2)
    if func == "exp":
        ev = math.exp(v)
        return u.chain(ev, ev, ev)
    if func == "log":
        if v <= 0:
            raise ValueError("log of non-positive value")
        return u.chain(math.log(v), 1.0 / v, -1.0 / (v * v))
    if func == "sqrt":
        if v < 0:
            raise ValueError("sqrt of negative value")
        if v == 0:
            raise ValueError("sqrt is not differentiable at 0")
        s = math.sqrt(v)
        return u.chain(s, 0.5 / s, -0.25 / (s * v))
    if func == "atan":
        w = 1.0 / (1.0 + v * v)
        return u.chain(math.atan(v), w, -2.0 * v * w * w)
    if func == "abs":
        # the zero crossing gets the zero subgradient
        sgn = (v > 0) - (v < 0)
        return u.chain(abs(v), float(sgn), 0.0)
    raise AssertionError(func)


def _jet(e, x):
    if isinstance(e, Number):
        return Jet2.const(float(e.text))
    if isinstance(e, Variable):
        return Jet2.var(x)
    if isinstance(e, NamedConstant):
        return Jet2.const(CONSTANTS[e.name])
    if isinstance(e, Neg):
        return -_jet(e.arg, x)
    if isinstance(e, Call):
        u = _jet(e.arg, x)
        try:
            return _apply(e.func, u)
        except ValueError as exc:
            raise DomainError(str(exc), e, x) from None
    a = _jet(e.left, x)
    if e.op == "^":
        n = _integer_exponent(e.right)
        if n is not None:
            if n < 0 and a.v == 0:
                raise DomainError("division by zero", e, x)
            return a.ipow(n)
        if a.v <= 0:
            raise DomainError("non-integer power of non-positive base", e, x)
        b = _jet(e.right, x)
        return _apply("exp", b * _apply("log", a))
    b = _jet(e.right, x)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if b.v == 0:
        raise DomainError("division by zero", e, x)
    return a / b


def eval_jet2(e: Expr, x: float) -> Jet2:
    """Value, first and second derivative of ``e`` at ``x``.

    Raises DomainError naming the offending sub-expression when ``x`` is
    outside the natural domain or the result is not finite.
    """
    try:
        j = _jet(e, float(x))
    except OverflowError:
        raise DomainError("overflow", e, x) from None
    except ZeroDivisionError:
        raise DomainError("division by zero", e, x) from None
    if not (math.isfinite(j.v) and math.isfinite(j.d1) and math.isfinite(j.d2)):
        raise DomainError("non-finite result", e, x)
    return j


def as_expr(f) -> Expr:
    """Accept either an already-parsed tree or expression text."""
    return parse(f) if isinstance(f, str) else f
