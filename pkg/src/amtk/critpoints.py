"""Critical points of the modulated signal ``F_k(x) = f(x) sin(x + k)``.

At every critical point ``|F_k(x)| = AM(f)(x)`` regardless of the phase ``k``;
:func:`envelope_certificate` checks this numerically.  Roots of
``F_k'(x) = f cos(x+k) + f' sin(x+k)`` are bracketed by a sign scan on a
uniform grid, bisected, then polished with one guarded Newton step.
Tangential zeros (no sign change) are not detected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .amcore import am_value
from .expr import as_expr, eval_jet2, parse

CELLS_PER_PERIOD = 256
MIN_GRID = 16
BISECT_RTOL = 1e-13
CLASSIFY_ATOL = 1e-10
# a refined bracket whose |F'| stays above this fraction of the local scale straddled a pole
POLE_RTOL = 1e-6


class Kind(str, Enum):
    MAX = "max"
    MIN = "min"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class CriticalPoint:
    x: float
    value: float
    kind: Kind
    deriv_residual: float
    envelope_residual: float


def default_grid(a: float, b: float) -> int:
    return max(MIN_GRID, math.ceil(CELLS_PER_PERIOD * (b - a) / (2 * math.pi)))


def _modulated(f, k, x):
    """``(jet of f, F, F', F'')`` for ``F = f(x) sin(x + k)``."""
    j = eval_jet2(f, x)
    s, c = math.sin(x + k), math.cos(x + k)
    F = j.v * s
    G = j.v * c + j.d1 * s
    H = j.d2 * s + 2.0 * j.d1 * c - j.v * s
    return j, F, G, H


def _deriv(f, k, x):
    return _modulated(f, k, x)[2]


def _bisect(fn, lo, hi, flo):
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo <= BISECT_RTOL * max(1.0, abs(mid)) or mid in (lo, hi):
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid, mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


def _refine(f, k, lo, hi, glo):
    lo, hi = _bisect(lambda t: _deriv(f, k, t), lo, hi, glo)
    x = 0.5 * (lo + hi)
    j, F, G, H = _modulated(f, k, x)
    if H != 0.0 and G != 0.0:
        xn = x - G / H
        if lo <= xn <= hi:
            jn, Fn, Gn, Hn = _modulated(f, k, xn)
            if abs(Gn) <= abs(G):
                x, j, F, G, H = xn, jn, Fn, Gn, Hn
    return x, j, F, G, H


def _point(x, j, F, G, H):
    if abs(H) < CLASSIFY_ATOL:
        kind = Kind.UNCLASSIFIED
    else:
        kind = Kind.MAX if H < 0 else Kind.MIN
    return CriticalPoint(
        x=x,
        value=F,
        kind=kind,
        deriv_residual=abs(G),
        envelope_residual=abs(abs(F) - am_value(j.v, j.d1)),
    )


def sign_change_brackets(values):
    """Cell indices ``i`` with a strict sign change between nodes ``i`` and ``i+1``,
    plus node indices where the value is exactly zero."""
    cells, zeros = [], []
    for i, v in enumerate(values):
        if v == 0.0:
            zeros.append(i)
        elif i + 1 < len(values) and values[i + 1] != 0.0 and (v < 0) != (values[i + 1] < 0):
            cells.append(i)
    return cells, zeros


def find_critical_points(f, k: float, a: float, b: float, grid: int | None = None) -> list[CriticalPoint]:
    """Critical points of ``f(x) sin(x + k)`` on ``[a, b]``, sorted by ``x``.

    ``grid`` is the number of scan cells (default: 256 per 2*pi of length).
    Sign changes caused by poles of ``F'`` are discarded.
    """
    if not a < b:
        raise ValueError("need a < b")
    if grid is None:
        grid = default_grid(a, b)
    if grid < MIN_GRID:
        raise ValueError(f"grid must be >= {MIN_GRID}")
    f = as_expr(f)
    nodes = [a + (b - a) * i / grid for i in range(grid)] + [b]
    values = [_deriv(f, k, t) for t in nodes]
    cells, zeros = sign_change_brackets(values)

    found = []
    for i in zeros:
        j, F, G, H = _modulated(f, k, nodes[i])
        found.append(_point(nodes[i], j, F, G, H))
    for i in cells:
        x, j, F, G, H = _refine(f, k, nodes[i], nodes[i + 1], values[i])
        if abs(G) > POLE_RTOL * max(abs(j.v) + abs(j.d1), 1e-300):
            continue
        found.append(_point(x, j, F, G, H))
    found.sort(key=lambda p: p.x)
    return found


@dataclass
class PhaseSummary:
    phase: float
    count: int
    max_envelope_residual: float


@dataclass
class EnvelopeReport:
    phases: list[PhaseSummary]
    max_envelope_residual: float
    points: dict = field(default_factory=dict)  # phase -> list[CriticalPoint]

    @property
    def total_points(self):
        return sum(p.count for p in self.phases)


def envelope_certificate(f, phases, a: float, b: float, grid: int | None = None) -> EnvelopeReport:
    """Check ``|F_k(x*)| = AM(f)(x*)`` at every critical point for each phase ``k``."""
    phases = list(phases)
    if not phases:
        raise ValueError("phases must be nonempty")
    f = as_expr(f)
    summaries, points = [], {}
    worst = 0.0
    for k in phases:
        pts = find_critical_points(f, k, a, b, grid)
        res = max((p.envelope_residual for p in pts), default=0.0)
        summaries.append(PhaseSummary(k, len(pts), res))
        points[k] = pts
        worst = max(worst, res)
    return EnvelopeReport(summaries, worst, points)


# --------------------------------------------------------------------------
# sinc maxima
# --------------------------------------------------------------------------

_SINC = parse("sin(x)/x")


@dataclass(frozen=True)
class SincRow:
    x: float
    sinc: float
    bound: float  # 1/sqrt(1 + x^2)


def tan_fixed_point(m: int) -> float:
    """The solution of ``tan(x) = x`` in ``(m*pi, m*pi + pi/2)`` for ``m >= 1``.

    Bisects ``x cos x - sin x``, which has the same roots but no poles.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    lo, hi = m * math.pi, m * math.pi + 0.5 * math.pi
    h = lambda t: t * math.cos(t) - math.sin(t)
    lo, hi = _bisect_full(h, lo, hi)
    return 0.5 * (lo + hi)


def _bisect_full(fn, lo, hi):
    flo = fn(lo)
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            return lo, hi
        fm = fn(mid)
        if fm == 0.0:
            return mid, mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid


def sinc(x: float) -> float:
    return 1.0 if x == 0 else math.sin(x) / x


def sinc_maxima(n: int) -> list[SincRow]:
    """First ``n`` local maxima of sinc on ``[0, inf)`` as ``(x, sinc(x), 1/sqrt(1+x^2))``.

    Row 0 is the removable point ``x = 0``.  Later rows are fixed points of
    ``tan(x) = x`` kept only where the second derivative of sinc is negative.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rows = [SincRow(0.0, 1.0, 1.0)]
    m = 1
    while len(rows) < n:
        x = tan_fixed_point(m)
        m += 1
        if eval_jet2(_SINC, x).d2 < 0:
            rows.append(SincRow(x, sinc(x), 1.0 / math.sqrt(1.0 + x * x)))
    return rows
