import math

import pytest

from amtk.amcore import SampledCurve, linspace, ratio
from amtk.aminverse import (
    Branch,
    Direction,
    InverseSolution,
    Segment,
    STITCH_TOL,
    _barrier_check,
    _ratio_invert,
    adaptive_simpson,
    critical_points_of,
    invert_monotone,
    monotonicity,
    ratio_invert,
    sampled_ratio,
    verify_roundtrip,
    weak_invert,
)
from amtk.errors import (
    BelowBarrierError,
    DomainError,
    NonMonotoneError,
    QuadratureError,
    RadicandNegativeError,
    RatioTooSmallError,
    UnresolvableCriticalPointError,
)
from amtk.expr import evaluate, parse

G_SINC = "1/sqrt(1+x^2)"  # AM(1/x)
TOL = 1e-5


def tabulated(fn, a, b, n):
    xs = linspace(a, b, n)
    seg = Segment(SampledCurve([(x, fn(x)) for x in xs]), Branch.MINUS, Direction.LEFT_TO_RIGHT)
    return InverseSolution([seg])


# -- invert_monotone ----------------------------------------------------------


def test_recovers_one_over_x():
    sol = invert_monotone(G_SINC, 1, 4, 1.0, 1e-3)
    assert max(abs(y - 1 / x) for x, y in sol.points) <= TOL
    assert sol.roundtrip_error <= TOL
    (seg,) = sol.segments
    assert seg.branch is Branch.MINUS and seg.direction is Direction.LEFT_TO_RIGHT
    assert seg.curve.xs[0] == 1 and seg.curve.xs[-1] == 4


def test_constant_g_is_a_fixed_point():
    sol = invert_monotone("0.7", 0, 1, 0.7, 1e-2)
    assert set(sol.segments[0].curve.ys) == {0.7}
    assert sol.roundtrip_error == 0.0


def test_increasing_g_runs_right_to_left():
    # AM(x) = x^2 / sqrt(x^2 + 1), so starting from f(3) = 3 recovers f = x
    sol = invert_monotone("x^2/sqrt(x^2+1)", 1, 3, 3.0, 1e-3)
    (seg,) = sol.segments
    assert seg.branch is Branch.PLUS and seg.direction is Direction.RIGHT_TO_LEFT
    assert max(abs(y - x) for x, y in sol.points) <= TOL
    ys = seg.curve.ys
    assert all(a <= b for a, b in zip(ys, ys[1:]))


def test_branch_and_barrier_properties():
    g = parse(G_SINC)
    sol = invert_monotone(g, 1, 4, 1.6, 1e-3)
    ys = sol.segments[0].curve.ys
    assert all(a >= b for a, b in zip(ys, ys[1:]))
    for x, y in sol.points:
        assert y >= evaluate(g, x) * (1 - 1e-12) > 0


def test_non_uniqueness():
    one = invert_monotone(G_SINC, 1, 4, 1.0, 1e-3)
    two = invert_monotone(G_SINC, 1, 4, 2.0, 1e-3)
    assert one.roundtrip_error <= TOL and two.roundtrip_error <= TOL
    dist = max(abs(p[1] - q[1]) for p, q in zip(one.points, two.points))
    assert dist > 10 * TOL
    assert max(abs(y - 1 / x) for x, y in two.points) > 10 * TOL


@pytest.mark.parametrize("h", [2e-3, 1e-3])
def test_step_halving(h):
    coarse = invert_monotone(G_SINC, 1, 4, 1.0, h).roundtrip_error
    fine = invert_monotone(G_SINC, 1, 4, 1.0, h / 2).roundtrip_error
    assert fine <= 0.3 * coarse


def test_monotone_errors():
    with pytest.raises(NonMonotoneError):
        invert_monotone("2 + sin(x)", 0, 6, 3.0)
    with pytest.raises(DomainError):
        invert_monotone("x", -1, 1, 3.0)
    with pytest.raises(BelowBarrierError):
        invert_monotone(G_SINC, 1, 4, 0.5)
    with pytest.raises(BelowBarrierError):
        # increasing g: the initial value is compared with g(b)
        invert_monotone("x", 1, 2, 1.5)
    with pytest.raises(ValueError):
        invert_monotone(G_SINC, 1, 4, 1.0, step=0.0)


def test_blow_down_is_reported():
    with pytest.raises(RadicandNegativeError):
        invert_monotone("exp(-20*x)", 0, 1, 1.0, step=0.2)


def test_barrier_check_clamp_tolerance():
    accept = _barrier_check(parse("1"))
    accept(0.0, 1.0 - 1e-14)
    with pytest.raises(RadicandNegativeError):
        accept(0.0, 1.0 - 1e-9)


def test_monotonicity():
    assert monotonicity(G_SINC, 0, 3) == -1
    assert monotonicity(G_SINC, -3, 0) == 1
    assert monotonicity("5", 0, 1) == -1


# -- weak inverse -------------------------------------------------------------


def test_weak_inverse_bump():
    g = "exp(-(x-2)^2)*0.5 + 0.5"
    sol = weak_invert(g, 0, 4)
    assert len(sol.segments) == 2
    assert sol.value_at(2.0) == pytest.approx(evaluate(parse(g), 2.0), abs=1e-15)
    assert sol.roundtrip_error <= 1e-4
    assert [s.direction for s in sol.segments] == [Direction.RIGHT_TO_LEFT, Direction.LEFT_TO_RIGHT]


def test_weak_inverse_sinc_bound():
    sol = weak_invert(G_SINC, -2, 2)
    assert [(s.curve.xs[0], s.curve.xs[-1]) for s in sol.segments] == [(-2, 0.0), (0.0, 2)]
    assert sol.value_at(0.0) == 1.0
    assert sol.roundtrip_error <= 1e-4
    assert all(err <= STITCH_TOL for _c, err in sol.seams)
    # symmetric data gives a symmetric inverse
    left = dict(sol.segments[0].curve.points)
    for x, y in sol.segments[1].curve.points:
        assert left[-x] == pytest.approx(y, abs=1e-12)


def test_weak_inverse_on_monotone_g_matches_invert_monotone():
    w = weak_invert(G_SINC, 1, 4, 1e-3)
    m = invert_monotone(G_SINC, 1, 4, evaluate(parse(G_SINC), 1), 1e-3)
    assert len(w.segments) == 1
    assert w.points == m.points


def test_weak_inverse_reports_seam_at_minimum():
    sol = weak_invert("2 + cos(x)", 2, 5)
    ((c, gap),) = sol.seams
    assert c == pytest.approx(math.pi, abs=1e-12)
    assert gap > STITCH_TOL
    assert sol.roundtrip_error <= 1e-4


def test_unresolvable_critical_points():
    with pytest.raises(UnresolvableCriticalPointError):
        weak_invert("2 + cos(40*x)", 0, 2, step=0.1)


def test_critical_points_of_g():
    assert critical_points_of(G_SINC, -2, 2, 256) == [0.0]
    assert critical_points_of(G_SINC, -2, 2.1, 256) == pytest.approx([0.0], abs=1e-15)
    assert critical_points_of(G_SINC, 0, 2, 256) == []


# -- verify_roundtrip -------------------------------------------------------------


def test_roundtrip_exact_pair():
    sol = tabulated(lambda x: 1 / x, 1, 4, 3001)
    assert verify_roundtrip(G_SINC, sol) <= 1e-8


def test_roundtrip_constant_pair():
    sol = tabulated(lambda x: 0.3, 0, 1, 101)
    assert verify_roundtrip("0.3", sol) == 0.0


def test_roundtrip_negative_control():
    sol = tabulated(lambda x: 1 / x, 1, 4, 3001)
    expected = max(abs(1 - 1 / math.sqrt(1 + x * x)) for x in sol.segments[0].curve.xs[2:-2])
    assert verify_roundtrip("1", sol) == pytest.approx(expected, rel=1e-6)
    assert verify_roundtrip("1", sol) > 0.1


# -- ratio inverse ------------------------------------------------------------------


def test_ratio_invert_exp():
    c = ratio_invert("sqrt(2)", 0, 1, "plus", 11)
    assert max(abs(y - math.exp(x)) for x, y in c.points) <= 1e-9
    assert c.ys[-1] / c.ys[0] == pytest.approx(math.e, rel=1e-12)


def test_ratio_invert_exp_minus():
    c = ratio_invert("sqrt(2)", 0, 1, "minus", 11)
    assert max(abs(y - math.exp(-x)) for x, y in c.points) <= 1e-9


def test_ratio_invert_gaussian():
    c = ratio_invert("sqrt(1+x^2)", 1, 2, "minus", 201)
    for x, y in c.points:
        assert y == pytest.approx(math.exp(-(x * x - 1) / 2), rel=1e-12)
    for x, r in sampled_ratio(c):
        assert abs(r - math.sqrt(1 + x * x)) <= 1e-6


def test_ratio_contract_through_am():
    # the sampled f, re-expressed as exp of its log, has f / AM(f) = r at every node
    c = ratio_invert("2 + sin(x)", 0, 3, "plus", 301)
    for x, r in sampled_ratio(c):
        assert abs(r - (2 + math.sin(x))) <= 1e-6


def test_scale_two_breaks_the_ratio():
    c = _ratio_invert(parse("sqrt(2)"), 0, 1, "plus", 51, 2.0)
    worst = max(abs(r - math.sqrt(2)) for _x, r in sampled_ratio(c))
    assert worst > 0.1


def test_ratio_needs_r_above_one():
    with pytest.raises(RatioTooSmallError):
        ratio_invert("1", 0, 1)
    with pytest.raises(RatioTooSmallError):
        ratio_invert("1.5 - x", 0, 1)


def test_ratio_of_exp_expression_agrees():
    # independent route: ratio() on the closed form exp(x) gives sqrt(2)
    assert ratio("exp(x)", 0.4) == pytest.approx(math.sqrt(2))


def test_adaptive_simpson():
    assert adaptive_simpson(lambda t: t**3, 0, 2) == pytest.approx(4.0, abs=1e-14)
    assert adaptive_simpson(math.sin, 0, math.pi) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda t: 1.0 if t < 0.3 else 0.0, 0, 1, tol=1e-15, max_depth=5)
