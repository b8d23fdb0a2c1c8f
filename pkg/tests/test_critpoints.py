import math

import pytest
from hypothesis import given, settings, strategies as st

from amtk.amcore import am_transform
from amtk.critpoints import (
    Kind,
    default_grid,
    envelope_certificate,
    find_critical_points,
    sinc,
    sinc_maxima,
    tan_fixed_point,
)
from amtk.expr import evaluate, parse

# frozen from an independent bisection on tan(x) - x (see oracle below)
TAN_FIXED_1 = 4.493409457909063
TAN_FIXED_2 = 7.725251836937707


def bisect_oracle(fn, lo, hi):
    flo = fn(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = fn(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_oracle_reproduces_frozen_values():
    h = lambda t: math.tan(t) - t
    assert bisect_oracle(h, math.pi + 1e-9, 1.5 * math.pi - 1e-9) == pytest.approx(TAN_FIXED_1, abs=1e-14)
    assert bisect_oracle(h, 2 * math.pi + 1e-9, 2.5 * math.pi - 1e-9) == pytest.approx(TAN_FIXED_2, abs=1e-14)


def test_first_critical_point_of_one_over_x():
    pts = find_critical_points("1/x", 0.0, 0.1, 20, grid=2000)
    assert pts[0].x == pytest.approx(TAN_FIXED_1, abs=1e-12)
    assert [p.kind for p in pts[:2]] == [Kind.MIN, Kind.MAX]


def test_critical_points_of_sine():
    pts = find_critical_points("1", 0.0, 0.1, 7)
    assert [p.x for p in pts] == pytest.approx([math.pi / 2, 1.5 * math.pi], abs=1e-12)
    assert [p.value for p in pts] == pytest.approx([1.0, -1.0], abs=1e-15)
    assert [p.kind for p in pts] == [Kind.MAX, Kind.MIN]


def test_exp_critical_values_on_envelope():
    pts = find_critical_points("exp(x)", 0.0, 0.0, 7)
    assert len(pts) == 2
    for p in pts:
        assert abs(abs(p.value) - math.exp(p.x) / math.sqrt(2)) <= 1e-9


def test_no_sign_change_gives_empty_list():
    # f = exp(-x) with k = pi/4: F' = exp(-x)(cos(x+k) - sin(x+k)) vanishes only at x = 0 mod pi
    assert find_critical_points("exp(-x)", math.pi / 4, 0.5, 2.5) == []


def test_invalid_arguments():
    with pytest.raises(ValueError):
        find_critical_points("1", 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        find_critical_points("1", 0.0, 0.0, 1.0, grid=8)


def test_default_grid():
    assert default_grid(0, 2 * math.pi) == 256
    assert default_grid(0, 0.01) == 16


def test_residuals_and_classification():
    f = parse("x^2 + 1")
    for p in find_critical_points(f, 0.3, -6, 6):
        scale = abs(evaluate(f, p.x)) + 2 * abs(p.x)
        assert p.deriv_residual <= 1e-12 * max(1.0, scale)
        assert p.envelope_residual <= 1e-12 * max(1.0, scale)
        s, c = math.sin(p.x + 0.3), math.cos(p.x + 0.3)
        second = 2 * s + 2 * (2 * p.x) * c - (p.x**2 + 1) * s
        assert (p.kind is Kind.MAX) == (second < 0)


def fine_scan_roots(f, k, a, b, cells):
    """Brute-force sign scan of F' on a much finer grid."""
    e = parse(f)

    def G(x):
        h = 1e-6
        F = lambda t: evaluate(e, t) * math.sin(t + k)
        return (F(x + h) - F(x - h)) / (2 * h)

    xs = [a + (b - a) * i / cells for i in range(cells + 1)]
    gs = [G(x) for x in xs]
    return [0.5 * (xs[i] + xs[i + 1]) for i in range(cells) if (gs[i] < 0) != (gs[i + 1] < 0)]


@pytest.mark.parametrize(
    "f, k, a, b, grid",
    [("1/x", 0.0, 0.5, 30.0, 64), ("x", 1.0, 0.5, 20.0, 40), ("exp(-x/5)", 2.0, -3, 9, 32), ("cos(x/3)+2", 0.4, 0, 12, 24)],
)
def test_complete_against_fine_scan(f, k, a, b, grid):
    found = [p.x for p in find_critical_points(f, k, a, b, grid)]
    brute = fine_scan_roots(f, k, a, b, 50 * grid)
    sep = 2 * (b - a) / grid
    for i, r in enumerate(brute):
        left = brute[i - 1] if i else -math.inf
        right = brute[i + 1] if i + 1 < len(brute) else math.inf
        if r - left > sep and right - r > sep:
            assert any(abs(r - x) <= (b - a) / (50 * grid) for x in found), r


def test_bracket_validity_single_sign_change():
    e = parse("1/x")
    pts = find_critical_points(e, 0.0, 0.5, 30)
    for p, q in zip(pts, pts[1:]):
        # the derivative changes sign exactly once between a point and the midpoint to the next
        G = lambda t: -math.sin(t) / t**2 + math.cos(t) / t
        lo, hi = p.x - 1e-6, 0.5 * (p.x + q.x)
        n = 400
        signs = [G(lo + (hi - lo) * i / n) < 0 for i in range(n + 1)]
        assert sum(s != t for s, t in zip(signs, signs[1:])) == 1


def test_pole_crossings_are_rejected():
    # F' ~ sin(c) / (x - c) changes sign through the singularity at c without vanishing
    c = 2.01
    e = parse(f"log(abs(x - {c}))")
    G = lambda t: math.cos(t) * math.log(abs(t - c)) + math.sin(t) / (t - c)
    assert G(c - 1e-3) < 0 < G(c + 1e-3)
    pts = find_critical_points(e, 0.0, 0.2, 3.0, grid=64)
    assert all(abs(p.x - c) > 1e-3 for p in pts)
    for p in pts:
        assert p.deriv_residual <= 1e-12


# -- envelope certificate ---------------------------------------------------


def test_certificate_one_over_x():
    rep = envelope_certificate("1/x", [0, 0.7, 2.1], 0.5, 30)
    assert rep.max_envelope_residual <= 1e-8
    assert [s.phase for s in rep.phases] == [0, 0.7, 2.1]
    assert all(s.count >= 8 for s in rep.phases)


def test_certificate_constant():
    rep = envelope_certificate("1", [0.3], 0, 7)
    assert rep.max_envelope_residual <= 1e-13


def test_certificate_identity():
    rep = envelope_certificate("x", [0, 1], 0.5, 20)
    assert rep.max_envelope_residual <= 1e-8
    for pts in rep.points.values():
        for p in pts:
            assert abs(abs(p.value) - p.x**2 / math.sqrt(p.x**2 + 1)) <= 1e-8


def test_certificate_is_deterministic():
    a = envelope_certificate("x^2 + 1", [0.1, 1.9], -4, 4)
    b = envelope_certificate("x^2 + 1", [0.1, 1.9], -4, 4)
    assert a == b


def test_certificate_needs_phases():
    with pytest.raises(ValueError):
        envelope_certificate("1", [], 0, 1)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["1/x", "x^2", "exp(x/3)", "1/(1 + x^2)"]), st.floats(-3.1, 3.1))
def test_phase_invariance(f, k):
    rep = envelope_certificate(f, [k], 0.5, 15)
    assert rep.max_envelope_residual <= 1e-8 * max(1.0, max(am_transform(f, x) for x in (0.5, 15)))


# -- sinc --------------------------------------------------------------------


def test_sinc_first_row():
    (row,) = sinc_maxima(1)
    assert (row.x, row.sinc, row.bound) == (0.0, 1.0, 1.0)


def test_sinc_second_row():
    rows = sinc_maxima(2)
    assert rows[1].x == pytest.approx(TAN_FIXED_2, abs=1e-12)
    assert rows[1].sinc == pytest.approx(0.1284, abs=5e-5)
    assert rows[1].bound == pytest.approx(0.1284, abs=5e-5)


@pytest.mark.parametrize("n", [3, 8, 20])
def test_sinc_table_contract(n):
    rows = sinc_maxima(n)
    assert len(rows) == n
    for r in rows:
        assert r.sinc > 0
        assert abs(r.sinc - r.bound) <= 1e-12
    assert all(a.bound > b.bound for a, b in zip(rows, rows[1:]))


def test_tan_fixed_points():
    assert tan_fixed_point(1) == pytest.approx(TAN_FIXED_1, abs=1e-14)
    assert tan_fixed_point(2) == pytest.approx(TAN_FIXED_2, abs=1e-14)
    assert sinc(0.0) == 1.0
