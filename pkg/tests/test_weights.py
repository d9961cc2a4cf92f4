import math

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from rifourier.funcore import QuadSpec, StepFn, cumulative_from_zero
from rifourier.weights import (CONVERGENT, DIVERGENT, Piece, Weight, admissible,
                               down_dual_weight, fourier_range_weight,
                               gamma_lambda_counterexample, level_weight, primitive,
                               probe_convergence, reflect_weight, tail_p)

GRID = np.geomspace(1e-4, 1e4, 50)


def mp_weight(u):
    """mpmath evaluation of a Weight straight from its piece records."""
    def f(t):
        for p in u.pieces:
            if p.lo <= t < p.hi:
                lg = abs(mpmath.log(t)) ** p.b if p.b else 1
                return p.c * t ** p.a * lg
        return 0
    return f


def _log_quad(g, a, b):
    """mpmath quadrature of g(t) dt over [a, b] in the variable u = ln t."""
    lo = -mpmath.inf if a == 0 else mpmath.log(a)
    hi = mpmath.inf if b == mpmath.inf or b == math.inf else mpmath.log(b)
    pts = [lo] + ([0] if lo < 0 < hi else []) + [hi]
    return mpmath.quad(lambda x: g(mpmath.exp(x)) * mpmath.exp(x), pts)


def mp_integral(u, a, b, extra=lambda t: 1):
    f = mp_weight(u)
    cuts = sorted({a, b, *[p.lo for p in u.pieces if a < p.lo < b]})
    return float(sum(_log_quad(lambda t: f(t) * extra(t), x, y)
                     for x, y in zip(cuts[:-1], cuts[1:])))


def test_power_examples():
    u = Weight.power(0.5)
    assert primitive(u, 4.0) == pytest.approx(4 ** 1.5 / 1.5, rel=1e-15)
    assert primitive(Weight.power(0.0), 3.0) == pytest.approx(3.0, rel=1e-15)
    assert tail_p(Weight.power(0.0), 1.0, 2.0) == pytest.approx(1.0, rel=1e-15)
    assert tail_p(Weight.power(0.5), 2.0, 3.0) == pytest.approx(2 ** -1.5 / 1.5, rel=1e-14)
    assert tail_p(Weight.power(1.0), 1.0, 2.0) == math.inf
    assert primitive(Weight.power(-1.0), 1.0) == math.inf


def test_counterexample_primitive_against_mpmath():
    mpmath.mp.dps = 30
    u = gamma_lambda_counterexample(2.0, 0.5)
    for t in (0.5, 1e-3, 3.0, 1e4):
        assert primitive(u, t) == pytest.approx(mp_integral(u, 0, t), rel=1e-8)
    for t in (0.5, 1e-3, 3.0):
        assert tail_p(u, t, 2.0) == pytest.approx(_tail_ref(u, t, 2.0), rel=1e-8)
    mpmath.mp.dps = 15


def _tail_ref(u, t, p):
    return mp_integral(u, t, mpmath.inf, lambda s: s ** -p)


def test_log_piece_against_incomplete_gamma():
    # int_0^t c s^a (ln 1/s)^b ds = c Gamma(b+1, (a+1) ln(1/t)) / (a+1)^(b+1)
    for a, b in [(-0.7, -0.5), (2.0, 1.5), (0.3, -0.9)]:
        u = Weight([Piece(0, 1, 1.7, a, b), Piece(1, math.inf, 0.0, 0.0, 0.0)])
        for t in (1e-9, 1e-3, 0.3, 0.9):
            k = a + 1
            ref = 1.7 * mpmath.gammainc(b + 1, k * -math.log(t)) / k ** (b + 1)
            assert primitive(u, t) == pytest.approx(float(ref), rel=1e-11)


@pytest.mark.parametrize("a, b", [(0.5, 1.3), (-0.7, -0.5), (2.0, 0.4), (-0.2, 2.5)])
def test_log_pieces_against_mpmath(a, b):
    u = Weight([Piece(0, 1, 1.7, a, b), Piece(1, 5, 0.3, 0.0, 0.0),
                Piece(5, math.inf, 1.0, -a - 2.5, b)])
    for t in (1e-6, 0.3, 1.0, 2.0, 7.0, 1e5):
        assert primitive(u, t) == pytest.approx(mp_integral(u, 0, t), rel=1e-9)
        assert tail_p(u, t, 1.5) == pytest.approx(_tail_ref(u, t, 1.5), rel=1e-9)


def test_integral_with_multiplier_against_mpmath():
    u = Weight([Piece(0, 1, 1.0, 1.0, -0.5), Piece(1, math.inf, 1.0, -0.5, 0.0)])
    lo, hi = np.array([0.1, 0.5, 2.0]), np.array([0.5, 2.0, 9.0])
    val, _ = u.integral(lo, hi, mult=lambda t, k: (1 + k + t) ** 2)
    for k in range(3):
        ref = mp_integral(u, lo[k], hi[k], lambda t, k=k: (1 + k + t) ** 2)
        assert val[k] == pytest.approx(ref, rel=1e-9)
    with pytest.raises(ValueError):
        u.integral(0.0, 1.0, mult=lambda t, k: t)


def test_construction_rules():
    with pytest.raises(ValueError, match="cover"):
        Weight([Piece(0, 1, 1, 0, 0)])
    with pytest.raises(ValueError, match="contiguous"):
        Weight([Piece(0, 1, 1, 0, 0), Piece(2, math.inf, 1, 0, 0)])
    with pytest.raises(ValueError, match="t = 1"):
        Weight([Piece(0, 1, 1, 0, -1.5), Piece(1, math.inf, 1, 0, 0)])
    with pytest.raises(ValueError):
        Weight([Piece(0, math.inf, -1, 0, 0)])
    u = Weight([Piece(0, math.inf, 1, 0, 0.5)])
    assert len(u.pieces) == 2


def test_records_roundtrip():
    u = gamma_lambda_counterexample(3.0, 0.25)
    assert Weight.from_records(u.to_records()) == u
    assert Weight.from_records([{"interval": [0, "inf"], "a": 2}]) == Weight.power(2.0)


def test_reflect_power_and_counterexample():
    assert reflect_weight(Weight.power(0.3), 3.0) == Weight.power(3 - 2 - 0.3)
    p = 2.0
    up = reflect_weight(gamma_lambda_counterexample(p, 0.5), p)
    last = up.pieces[-1]
    assert (last.lo, last.a, last.b) == (1.0, -p - 1, -0.5)


def test_reflection_is_involution_symbolically():
    t, p, a, b = sp.symbols("t p a b", positive=True)
    u = t ** a * sp.log(t) ** b
    once = u.subs(t, 1 / t) * t ** (p - 2)
    twice = once.subs(t, 1 / t) * t ** (p - 2)
    assert sp.simplify(sp.powsimp(sp.expand_power_base(twice / u, force=True), force=True)
                       .subs(sp.log(1 / t), -sp.log(t))) in (1, (-1) ** b * (-1) ** (-b))
    rng = np.random.default_rng(3)
    for _ in range(20):
        w = Weight([Piece(0, 0.5, rng.uniform(0.1, 2), rng.uniform(-3, 3), rng.uniform(-2, 2)),
                    Piece(0.5, 3, rng.uniform(0.1, 2), rng.uniform(-3, 3), 0),
                    Piece(3, math.inf, rng.uniform(0.1, 2), rng.uniform(-3, 3), rng.uniform(-2, 2))])
        pp = rng.uniform(1.1, 5)
        back = reflect_weight(reflect_weight(w, pp), pp)
        assert np.allclose(back(GRID), w(GRID), rtol=1e-12)


def test_products_and_scaling():
    u = Weight.power(1.0, 2.0) * Weight.power(-0.5)
    assert u == Weight.power(0.5, 2.0)
    assert (3 * Weight.power(1.0))(2.0) == 6.0
    v = Weight.from_step(StepFn([1.0], [2.0, 1.0])) * Weight.power(1.0)
    assert v(0.5) == 1.0 and v(3.0) == 3.0


def test_down_dual_constant_example():
    vd = down_dual_weight(Weight.power(0.0), 2.0)
    assert np.allclose(vd(GRID), 0.125, rtol=1e-12)


def test_down_dual_power_closed_form_symbolic():
    t, beta, q = sp.symbols("t beta q", positive=True)
    qp = q / (q - 1)
    V = t ** (beta + 1) / (beta + 1)
    T = t ** (beta - q + 1) / (q - beta - 1)
    expr = t ** (qp + q - 1) * V * T / (V + t ** q * T) ** (qp + 1)
    for bval, qval in [(0.5, 2.0), (-0.5, 3.0), (1.0, 4.0), (0.0, 1.5)]:
        ref = sp.lambdify(t, expr.subs({beta: bval, q: qval}))
        got = down_dual_weight(Weight.power(bval), qval)
        assert np.allclose(got(GRID), ref(GRID), rtol=1e-9)
        assert isinstance(got.closed_form, Weight) and got.closed_form.is_power
        assert np.allclose(got.closed_form(GRID), ref(GRID), rtol=1e-10)


def test_down_dual_errors_and_positivity():
    with pytest.raises(ValueError, match="finite total mass"):
        down_dual_weight(Weight([Piece(0, 1, 1, 0, 0), Piece(1, math.inf, 1, -2, 0)]), 2.0)
    vd = down_dual_weight(gamma_lambda_counterexample(2.0, 0.5), 3.0)
    assert np.all(vd(GRID) > 0)


def test_level_weight_examples():
    assert np.allclose(level_weight(Weight.power(0.0), 2.0)(GRID), 2.0, rtol=1e-12)
    u = Weight.power(0.4, 1.5)
    assert np.allclose(level_weight(u, 3.0)(GRID), 3 * 1.5 * GRID ** 0.4 / (3 - 1.4), rtol=1e-12)
    with pytest.raises(ValueError, match="divergent tail"):
        level_weight(Weight.power(1.0), 2.0)


def _bracket(u, t, p):
    return u.primitive(t) + t ** p * u.tail(t, p)


def test_level_identity_power_weights():
    rng = np.random.default_rng(11)
    for _ in range(20):
        p = rng.uniform(1.2, 5)
        a = rng.uniform(-0.9, p - 1.1)
        u = Weight.power(a, rng.uniform(0.2, 3))
        w = level_weight(u, p)
        prim = w.closed_form.primitive(GRID)
        assert np.allclose(prim, _bracket(u, GRID, p), rtol=1e-12)


def test_level_identity_log_weights():
    q = QuadSpec(rel_tol=1e-11)
    for alpha in (0.25, 0.5, 0.75):
        u = gamma_lambda_counterexample(2.0, alpha)
        w = level_weight(u, 2.0, q)
        assert w.closed_form is None
        prim = cumulative_from_zero(w, GRID, q)
        assert np.allclose(prim, _bracket(u, GRID, 2.0), rtol=1e-8)


def test_fourier_range_composition_identity():
    rng = np.random.default_rng(5)
    for _ in range(10):
        p = rng.uniform(1.5, 4)
        u = Weight.power(rng.uniform(-0.9, p - 1.1))
        lhs = fourier_range_weight(u, p)(GRID)
        rhs = level_weight(u, p)(1 / GRID) * GRID ** (2 * p - 2)
        assert np.allclose(lhs, rhs, rtol=1e-9)
    u = gamma_lambda_counterexample(2.0, 0.5)
    assert np.allclose(fourier_range_weight(u, 2.0)(GRID),
                       level_weight(u, 2.0)(1 / GRID) * GRID ** 2, rtol=1e-9)


def test_fourier_range_power_closed_form():
    p, a = 2.0, 0.0
    w = fourier_range_weight(Weight.power(a), p)
    assert np.allclose(w(GRID), 2 * GRID ** 2, rtol=1e-12)
    assert w.closed_form == Weight.power(2 * p - 2 - a, p / (p - a - 1))


def test_admissible():
    assert admissible(Weight.power(0.5), 2.0).ok
    assert not admissible(Weight.power(1.0), 2.0).ok
    assert not admissible(Weight.power(-1.0), 2.0).ok
    for alpha in (0.1, 0.5, 0.9):
        assert admissible(gamma_lambda_counterexample(2.0, alpha), 2.0).ok


def test_probe_agrees_with_exponent_rule():
    rng = np.random.default_rng(17)
    for _ in range(20):
        a0 = -1 + rng.choice([-1, 1]) * rng.choice([0.0, 0.003, 0.05])
        a1 = -1 + rng.choice([-1, 1]) * rng.choice([0.0, 0.003, 0.05])
        b0, b1 = rng.choice([-1.6, -1.05, -0.95, 0.0, 0.8], size=2)
        u = Weight([Piece(0, 0.5, 1, a0, b0), Piece(0.5, 2, 1, 0, 0), Piece(2, math.inf, 1, a1, b1)])
        exact, probe = u.convergence(), probe_convergence(u)
        assert (exact.at_zero, exact.at_infinity) == (probe.at_zero, probe.at_infinity)
        assert probe.decided_by == "quadrature"


@given(st.floats(-0.95, 3.0), st.floats(1.1, 6.0), st.floats(1e-3, 1e3))
def test_power_transforms_match_closed_forms(a, p, t):
    u = Weight.power(a)
    if a < p - 1.05:
        lv = level_weight(u, p)
        assert lv.func(np.array([t]))[0] == pytest.approx(lv.closed_form(t), rel=1e-10)
    assert reflect_weight(u, p)(t) == pytest.approx(t ** (p - 2 - a), rel=1e-12)


def test_convergence_verdicts():
    u = gamma_lambda_counterexample(2.0, 0.5)
    assert u.convergence().at_zero == CONVERGENT
    assert u.convergence().at_infinity == DIVERGENT
