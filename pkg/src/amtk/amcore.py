"""Forward AM transform ``AM(f) = f^2 / sqrt(f^2 + f'^2)`` and related quantities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import AmError, NonPositiveError
from .expr import Call, Expr, as_expr, eval_jet2

# relative tolerance for internal identity checks
IDENTITY_RTOL = 1e-12


def am_value(v: float, d1: float) -> float:
    """AM transform from a value and its first derivative.

    The double zero ``v == d1 == 0`` maps to 0, the limit forced by ``AM <= |f|``.
    """
    if v == 0.0 and d1 == 0.0:
        return 0.0
    av = abs(v)
    return av * (av / math.hypot(v, d1))


def am_transform(f, x: float) -> float:
    """AM transform of ``f`` at ``x`` (always >= 0)."""
    j = eval_jet2(as_expr(f), x)
    return am_value(j.v, j.d1)


def ratio(f, x: float) -> float:
    """``f(x) / AM(f)(x) = sqrt(1 + (f'/f)^2)``; requires ``f(x) > 0``."""
    f = as_expr(f)
    j = eval_jet2(f, x)
    if j.v <= 0:
        raise NonPositiveError("ratio requires f(x) > 0", f, x)
    return math.hypot(1.0, j.d1 / j.v)


def am_of_exp_check(g, x: float) -> tuple[float, float]:
    """Both sides of ``AM(exp(g)) = exp(g) / sqrt(1 + g'^2)`` at ``x``."""
    g = as_expr(g)
    lhs = am_transform(Call("exp", g), x)
    j = eval_jet2(g, x)
    rhs = math.exp(j.v) / math.hypot(1.0, j.d1)
    return lhs, rhs


@dataclass
class SampledCurve:
    """Samples ``(x, y)`` with strictly increasing ``x`` and finite ``y``."""

    points: list[tuple[float, float]]
    label: str = ""
    omitted: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def xs(self) -> list[float]:
        return [p[0] for p in self.points]

    @property
    def ys(self) -> list[float]:
        return [p[1] for p in self.points]

    def __len__(self):
        return len(self.points)


def linspace(a: float, b: float, n: int) -> list[float]:
    """``n`` uniform nodes on ``[a, b]`` with both endpoints hit exactly."""
    if n < 2:
        raise ValueError("need at least two samples")
    h = (b - a) / (n - 1)
    xs = [a + i * h for i in range(n - 1)]
    xs.append(b)
    return xs


def am_curve(f, a: float, b: float, n: int) -> SampledCurve:
    """Sample ``AM(f)`` at ``n`` uniform points of ``[a, b]``.

    Points where evaluation fails are dropped and counted in ``omitted``.
    """
    if not a < b:
        raise ValueError("need a < b")
    f = as_expr(f)
    points = []
    omitted = 0
    for x in linspace(a, b, n):
        try:
            y = am_transform(f, x)
        except (AmError, ArithmeticError):
            omitted += 1
            continue
        if math.isfinite(y):
            points.append((x, y))
        else:
            omitted += 1
    return SampledCurve(points, label=f"AM({f})", omitted=omitted, meta={"omitted": omitted})
