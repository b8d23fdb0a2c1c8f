"""Annihilating polynomials for AM transforms of algebraic functions.

If ``y = f(x)`` satisfies ``P(x, y) = 0`` then ``z = AM(f)(x)`` satisfies a
polynomial ``A(x, z) = 0``.  With ``p = f'`` the defining relation squared is
``z^2 (y^2 + p^2) - y^4 = 0``; implicit differentiation of ``P`` relates ``p``
to ``x, y``; eliminating ``p`` and then ``y`` by resultants leaves ``A``.
Squaring admits the ``-AM`` branch too, so ``A`` also vanishes there.
"""

from __future__ import annotations

import math

import numpy as np

from .amcore import am_transform, am_value, linspace
from .errors import EliminationCollapseError, PolynomialError
from .polynomial import (
    RatPoly,
    gcd,
    primitive_part,
    resultant,
    squarefree_factors,
)

X, Y, P_, Z = (RatPoly.var(v) for v in ("x", "y", "p", "z"))

# abscissae used to sample real branches of P(x, y) = 0
CURVE_SAMPLES = (-2.71, -1.93, -1.37, -0.77, -0.41, 0.37, 0.83, 1.29, 1.71, 2.33, 3.07, 4.19)
VANISH_TOL = 1e-8


def _require_vars(P, allowed, what):
    extra = set(P.variables) - set(allowed)
    if extra:
        raise PolynomialError(f"{what} may only involve {sorted(allowed)}, found {sorted(extra)}")


def implicit_derivative_relation(P: RatPoly) -> RatPoly:
    """``dP/dx + p * dP/dy``: the relation satisfied by ``(x, y, y')`` on ``P = 0``."""
    _require_vars(P, ("x", "y"), "P")
    if P.degree("y") < 1:
        raise PolynomialError("P must involve y")
    return (P.diff("x") + P_ * P.diff("y")).normalized()


def am_relation() -> RatPoly:
    """``z^2 (y^2 + p^2) - y^4``, the squared transform with ``p = y'``."""
    return Z ** 2 * (Y ** 2 + P_ ** 2) - Y ** 4


def curve_points(P: RatPoly, xs=CURVE_SAMPLES):
    """Real points ``(x, y, y', AM)`` on ``P(x, y) = 0`` above the abscissae ``xs``.

    Branch points where ``dP/dy`` vanishes are skipped.
    """
    cy = P.coeffs("y")
    deg = max(cy)
    Px, Py = P.diff("x"), P.diff("y")
    out = []
    for x0 in xs:
        coeffs = [cy[d].evaluate({"x": x0})[0] if d in cy else 0.0 for d in range(deg, -1, -1)]
        while coeffs and coeffs[0] == 0.0:
            coeffs.pop(0)
        if len(coeffs) < 2:
            continue
        for root in np.roots(coeffs):
            if abs(root.imag) > 1e-7 * (1.0 + abs(root.real)):
                continue
            y0 = float(root.real)
            for _ in range(3):
                v, _big = P.evaluate({"x": x0, "y": y0})
                dv, _big = Py.evaluate({"x": x0, "y": y0})
                if dv == 0.0:
                    break
                y0 -= v / dv
            py, big = Py.evaluate({"x": x0, "y": y0})
            if abs(py) <= 1e-9 * (1.0 + big):
                continue
            p0 = -Px.evaluate({"x": x0, "y": y0})[0] / py
            out.append((x0, y0, p0, am_value(y0, p0)))
    return out


def _relative_residual(A, x, z):
    val, big = A.evaluate({"x": x, "z": z})
    return abs(val) / (1.0 + big)


def curve_residual(A: RatPoly, P: RatPoly) -> float:
    """Max scale-normalized ``|A(x, AM)|`` over sampled real points of ``P = 0``."""
    pts = curve_points(P)
    return max((_relative_residual(A, x, z) for x, _y, _p, z in pts), default=0.0)


def am_annihilator(P: RatPoly) -> RatPoly:
    """Nonzero ``A(x, z)`` vanishing at ``z = AM(f)(x)`` for every real branch ``f`` of ``P = 0``.

    ``P`` must be squarefree and involve ``y``.  Pure-``x`` content and
    repeated factors are removed exactly; squarefree pieces that do not vanish
    on sampled points of the curve are dropped.
    """
    D = implicit_derivative_relation(P)
    R1 = resultant(am_relation(), D, "p")
    if R1.is_zero():
        raise EliminationCollapseError("eliminating p gave the zero polynomial")
    A = resultant(R1, P, "y") if R1.degree("y") >= 1 else R1
    if A.is_zero():
        raise EliminationCollapseError("eliminating y gave the zero polynomial; is P squarefree?")
    if A.degree("z") < 1:
        raise EliminationCollapseError("elimination left no dependence on z")
    A = primitive_part(A, "z")
    pieces = [f for f, _mult in squarefree_factors(A, "z")]
    pts = curve_points(P)
    if pts:
        kept = [f for f in pieces if any(_relative_residual(f, x, z) <= VANISH_TOL for x, _y, _p, z in pts)]
        pieces = kept or pieces
    out = RatPoly.const(1)
    for f in pieces:
        out = out * f
    return out.normalized()


def verify_annihilator(A: RatPoly, f, a: float, b: float, n: int = 32) -> float:
    """Max over ``n`` samples of ``|A(x, AM(f)(x))| / (1 + largest |monomial|)``."""
    if n < 8:
        raise ValueError("n must be >= 8")
    _require_vars(A, ("x", "z"), "A")
    return max(_relative_residual(A, x, am_transform(f, x)) for x in linspace(a, b, n))


# --------------------------------------------------------------------------
# closure under composition, products and sums
# --------------------------------------------------------------------------


def _squarefree_in(R, var):
    if R.is_zero():
        raise EliminationCollapseError("elimination gave the zero polynomial")
    R = primitive_part(R, var)
    out = RatPoly.const(1)
    for f, _mult in squarefree_factors(R, var):
        out = out * f
    return out.normalized()


def compose_relation(P: RatPoly, Q: RatPoly) -> RatPoly:
    """Relation in ``x, z`` for ``z`` with ``Q(y, z) = 0`` where ``P(x, y) = 0``."""
    return _squarefree_in(resultant(P, Q, "y"), "z")


def _binary_relation(P1, P2, combine):
    U, V = RatPoly.var("u"), RatPoly.var("v")
    P1u = P1.rename({"y": "u"})
    P2v = P2.rename({"y": "v"})
    R = resultant(P1u, combine(U, V), "u")
    return _squarefree_in(resultant(R, P2v, "v"), "y")


def product_relation(P1: RatPoly, P2: RatPoly) -> RatPoly:
    """Relation in ``x, y`` satisfied by ``y = y1 * y2``."""
    return _binary_relation(P1, P2, lambda u, v: u * v - Y)


def sum_relation(P1: RatPoly, P2: RatPoly) -> RatPoly:
    """Relation in ``x, y`` satisfied by ``y = y1 + y2``."""
    return _binary_relation(P1, P2, lambda u, v: u + v - Y)
