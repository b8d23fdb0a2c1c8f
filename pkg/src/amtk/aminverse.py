"""Inverting the AM transform.

Given ``g > 0`` we look for ``f >= g`` with ``AM(f) = g``, i.e. a solution of

    f' = -f sqrt(f^2/g^2 - 1)   (g decreasing, integrated left to right)
    f' = +f sqrt(f^2/g^2 - 1)   (g increasing, integrated right to left)

on pieces where ``g`` is monotone.  A weak inverse stitches such pieces at the
critical points of ``g``.  Independently, ``ratio_invert`` builds ``f`` with a
prescribed ratio ``f / AM(f) = r`` in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .amcore import SampledCurve, am_value, linspace
from .errors import (
    BelowBarrierError,
    DomainError,
    NonMonotoneError,
    QuadratureError,
    RadicandNegativeError,
    RatioTooSmallError,
    UnresolvableCriticalPointError,
)
from .expr import as_expr, eval_jet2, evaluate

RADICAND_CLAMP = 1e-12
MONOTONE_SAMPLES = 64
STITCH_TOL = 1e-9
# g' samples below this (relative to |g|) count as zero in the monotonicity check
FLAT_RTOL = 1e-12


class Branch(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


class Direction(str, Enum):
    LEFT_TO_RIGHT = "left_to_right"
    RIGHT_TO_LEFT = "right_to_left"


@dataclass
class Segment:
    curve: SampledCurve
    branch: Branch
    direction: Direction


@dataclass
class InverseSolution:
    segments: list[Segment]
    roundtrip_error: float = math.nan
    # |f_left(c) - f_right(c)| at each interior breakpoint c
    seams: list[tuple[float, float]] = field(default_factory=list)

    @property
    def points(self) -> list[tuple[float, float]]:
        """All samples in x order; shared breakpoints appear once."""
        out = []
        for seg in self.segments:
            pts = seg.curve.points
            if out and pts and pts[0][0] == out[-1][0]:
                pts = pts[1:]
            out.extend(pts)
        return out

    def value_at(self, x: float) -> float:
        """Sample value at an exact grid node ``x``."""
        for px, py in self.points:
            if px == x:
                return py
        raise KeyError(x)


def _g_value(g, x):
    v = evaluate(g, x)
    if not v > 0:
        raise DomainError("g must be positive", g, x)
    return v


def monotonicity(g, a: float, b: float, samples: int = MONOTONE_SAMPLES) -> int:
    """-1 if ``g`` is nonincreasing on ``[a, b]``, +1 if nondecreasing.

    Constant ``g`` counts as nonincreasing.  Raises NonMonotoneError if the
    sampled derivative takes both signs and DomainError if ``g <= 0`` at a sample.
    """
    g = as_expr(g)
    neg = pos = False
    for x in linspace(a, b, samples):
        j = eval_jet2(g, x)
        if not j.v > 0:
            raise DomainError("g must be positive", g, x)
        if abs(j.d1) <= FLAT_RTOL * abs(j.v):
            continue
        if j.d1 < 0:
            neg = True
        else:
            pos = True
    if neg and pos:
        raise NonMonotoneError(f"g is not monotone on [{a}, {b}]")
    return 1 if pos else -1


def _rk4(rhs, x0, y0, x1, nsteps, accept=None):
    h = (x1 - x0) / nsteps
    xs, ys = [x0], [y0]
    y = y0
    for i in range(nsteps):
        x = x0 + i * h
        k1 = rhs(x, y)
        k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(x + h, y + h * k3)
        y = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        xn = x1 if i == nsteps - 1 else x0 + (i + 1) * h
        if accept is not None:
            accept(xn, y)
        xs.append(xn)
        ys.append(y)
    return xs, ys


def _radicand(g, x, f):
    q = f / _g_value(g, x)
    return q * q - 1.0


def _inversion_rhs(g, sign):
    # trial stages may overshoot the barrier next to f = g, where the right-hand
    # side is not Lipschitz; they are clamped, accepted samples are checked below
    def rhs(x, f):
        return sign * f * math.sqrt(max(_radicand(g, x, f), 0.0))

    return rhs


def _barrier_check(g):
    def accept(x, f):
        if not (math.isfinite(f) and f > 0.0):
            raise RadicandNegativeError(f"integration broke down at x={x!r} (f = {f!r})")
        rad = _radicand(g, x, f)
        if rad < -RADICAND_CLAMP:
            raise RadicandNegativeError(f"f fell below g at x={x!r} (f^2/g^2 - 1 = {rad:.3e})")

    return accept


def invert_monotone(g, a: float, b: float, f0: float, step: float = 1e-3) -> InverseSolution:
    """Solve the inversion ODE on a piece where ``g`` is monotone.

    For decreasing ``g`` integration starts at ``a`` with ``f(a) = f0`` on the
    minus branch; for increasing ``g`` it starts at ``b`` with ``f(b) = f0`` on
    the plus branch and runs right to left.  Classical RK4; ``step`` is shrunk
    so that a whole number of steps covers ``[a, b]``.
    """
    if not a < b:
        raise ValueError("need a < b")
    if not step > 0:
        raise ValueError("step must be positive")
    g = as_expr(g)
    trend = monotonicity(g, a, b)
    nsteps = max(1, math.ceil((b - a) / step - 1e-9))
    if trend < 0:
        start, end, branch, direction = a, b, Branch.MINUS, Direction.LEFT_TO_RIGHT
    else:
        start, end, branch, direction = b, a, Branch.PLUS, Direction.RIGHT_TO_LEFT
    g0 = _g_value(g, start)
    if f0 < g0:
        raise BelowBarrierError(f"initial value {f0!r} is below g({start!r}) = {g0!r}")
    sign = -1.0 if branch is Branch.MINUS else 1.0
    xs, ys = _rk4(_inversion_rhs(g, sign), start, float(f0), end, nsteps, _barrier_check(g))
    if direction is Direction.RIGHT_TO_LEFT:
        xs.reverse()
        ys.reverse()
    seg = Segment(SampledCurve(list(zip(xs, ys)), label="f"), branch, direction)
    sol = InverseSolution([seg])
    sol.roundtrip_error = verify_roundtrip(g, sol)
    return sol


def _five_point_derivative(ys, h, i):
    return (ys[i - 2] - 8.0 * ys[i - 1] + 8.0 * ys[i + 1] - ys[i + 2]) / (12.0 * h)


def verify_roundtrip(g, sol: InverseSolution) -> float:
    """Sup of ``|AM(f) - g|`` over interior samples of every segment.

    ``f'`` is estimated by five-point central differences, so two samples at
    each end of a segment are skipped.
    """
    g = as_expr(g)
    worst = 0.0
    for seg in sol.segments:
        xs, ys = seg.curve.xs, seg.curve.ys
        if len(xs) < 5:
            continue
        h = (xs[-1] - xs[0]) / (len(xs) - 1)
        for i in range(2, len(xs) - 2):
            d = _five_point_derivative(ys, h, i)
            worst = max(worst, abs(am_value(ys[i], d) - evaluate(g, xs[i])))
    return worst


def critical_points_of(g, a: float, b: float, cells: int) -> list[float]:
    """Interior sign changes of ``g'`` on ``[a, b]``, refined by bisection."""
    g = as_expr(g)
    nodes = [a + (b - a) * i / cells for i in range(cells)] + [b]
    d1 = [eval_jet2(g, t).d1 for t in nodes]
    # treat |g'| at rounding level as exact zero so flat endpoints do not split pieces
    d1 = [0.0 if abs(d) <= FLAT_RTOL * abs(evaluate(g, t)) else d for d, t in zip(d1, nodes)]
    roots = []
    # runs of zero nodes: a critical point only if the sign differs across the run
    signed = [i for i, d in enumerate(d1) if d != 0.0]
    for i, j in zip(signed, signed[1:]):
        if (d1[i] < 0) == (d1[j] < 0):
            continue
        if j == i + 1:
            lo, hi, flo = nodes[i], nodes[j], d1[i]
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid in (lo, hi):
                    break
                fm = eval_jet2(g, mid).d1
                if fm == 0.0:
                    lo = hi = mid
                    break
                if (fm < 0) == (flo < 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
        else:
            roots.append(nodes[(i + j) // 2] if (j - i) % 2 == 0 else 0.5 * (nodes[(i + j) // 2] + nodes[(i + j) // 2 + 1]))
    eps = 1e-12 * (b - a)
    return [r for r in roots if a + eps < r < b - eps]


def weak_invert(g, a: float, b: float, step: float = 1e-3) -> InverseSolution:
    """Stitched inverse of ``g`` across its critical points.

    Each monotone piece is integrated from the endpoint its case dictates
    (left end when ``g`` decreases, right end when it increases) with
    ``f = g`` there.  At a local maximum of ``g`` both neighbouring pieces
    start from ``f = g`` so they agree exactly; at a local minimum the two
    pieces arrive independently and the mismatch is reported in ``seams``.
    """
    if not a < b:
        raise ValueError("need a < b")
    g = as_expr(g)
    cells = max(256, math.ceil((b - a) / step))
    cuts = critical_points_of(g, a, b, cells)
    bounds = [a, *cuts, b]
    for lo, hi in zip(bounds, bounds[1:]):
        if hi - lo < step:
            raise UnresolvableCriticalPointError(
                f"critical points of g closer than the step near x={lo!r}"
            )
    segments = []
    for lo, hi in zip(bounds, bounds[1:]):
        start = lo if monotonicity(g, lo, hi) < 0 else hi
        piece = invert_monotone(g, lo, hi, _g_value(g, start), step)
        segments.extend(piece.segments)
    seams = []
    for left, right in zip(segments, segments[1:]):
        c = left.curve.points[-1][0]
        seams.append((c, abs(left.curve.points[-1][1] - right.curve.points[0][1])))
    sol = InverseSolution(segments, seams=seams)
    sol.roundtrip_error = verify_roundtrip(g, sol)
    return sol


# --------------------------------------------------------------------------
# explicit ratio inverse
# --------------------------------------------------------------------------


def adaptive_simpson(fn, a: float, b: float, tol: float = 1e-13, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature; raises QuadratureError past ``max_depth``."""
    fa, fm, fb = fn(a), fn(0.5 * (a + b)), fn(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = fn(lm), fn(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise QuadratureError(f"adaptive Simpson did not converge on [{a}, {b}]")
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + recurse(
            m, b, fm, frm, fb, right, 0.5 * tol, depth + 1
        )

    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def _ratio_invert(r, a, b, sign, n, scale):
    r = as_expr(r)
    if not a < b:
        raise ValueError("need a < b")
    sgn = {"plus": 1.0, "minus": -1.0}[Branch(sign).value]

    def integrand(t):
        rt = evaluate(r, t)
        if not rt > 1.0:
            raise RatioTooSmallError(f"r must exceed 1, got r({t!r}) = {rt!r}")
        return math.sqrt(rt * rt - 1.0)

    xs = linspace(a, b, n)
    for x in xs:
        integrand(x)
    total = 0.0
    points = [(xs[0], 1.0)]
    for x0, x1 in zip(xs, xs[1:]):
        total += adaptive_simpson(integrand, x0, x1)
        points.append((x1, math.exp(sgn * scale * total)))
    return SampledCurve(points, label=f"ratio_invert({r}, {Branch(sign).value})")


def ratio_invert(r, a: float, b: float, sign="plus", n: int = 101) -> SampledCurve:
    """Positive ``f`` on ``[a, b]`` with ``f / AM(f) = r``, normalised to ``f(a) = 1``.

    ``f(x) = exp(+-int_a^x sqrt(r^2 - 1) dt)``; requires ``r > 1``.
    """
    return _ratio_invert(r, a, b, sign, n, 1.0)


def sampled_ratio(curve: SampledCurve) -> list[tuple[float, float]]:
    """``f / AM(f)`` at interior samples, with ``f'`` from five-point differences."""
    xs, ys = curve.xs, curve.ys
    h = (xs[-1] - xs[0]) / (len(xs) - 1)
    out = []
    for i in range(2, len(xs) - 2):
        d = _five_point_derivative(ys, h, i)
        out.append((xs[i], math.hypot(1.0, d / ys[i])))
    return out
