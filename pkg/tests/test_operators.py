import math

import mpmath
import numpy as np
import pytest

from rifourier.funcore import (Envelope, EvalFn, QuadSpec, StepFn, hardy_average, hardy_tail,
                               integrate, integrate_evalfn, rearrange, reciprocal_primitive)

from conftest import random_step, step_eval
from oracles import riemann_average

GRID = np.geomspace(1e-3, 1e3, 100)


def test_average_examples():
    P = hardy_average(StepFn.indicator(1.0))
    assert P(2.0) == 0.5
    assert np.allclose(P(GRID), np.minimum(1, 1 / GRID), rtol=1e-15)


def test_tail_examples():
    Q = hardy_tail(StepFn.indicator(1.0))
    assert np.allclose(Q(GRID), np.log(np.maximum(1 / GRID, 1)), rtol=1e-14, atol=0)
    assert hardy_tail(StepFn.indicator(math.e, 1.0))(1.0) == pytest.approx(1.0, rel=1e-15)


def test_tail_requires_vanishing():
    with pytest.raises(ValueError, match="Q undefined"):
        hardy_tail(StepFn([1.0], [0.0, 1.0]))
    g = EvalFn(lambda t: np.ones_like(t), "none")
    with pytest.raises(ValueError, match="Q undefined"):
        hardy_tail(g)


def test_average_requires_integrable_origin():
    g = EvalFn(lambda t: 1 / t, "decreasing", Envelope(1.0, 1.0, 0.0), Envelope(1.0, 1.0, 1.0))
    with pytest.raises(ValueError, match="P undefined"):
        hardy_average(g)


def test_average_matches_riemann_sum(rng):
    for _ in range(5):
        f = random_step(rng, 10)
        t = np.geomspace(0.05, 40, 7)
        assert np.allclose(hardy_average(f)(t), riemann_average(f, t), rtol=1e-9)


def test_tail_matches_quadrature_oracle(rng):
    for _ in range(5):
        f = random_step(rng, 8)
        pts = [0.0] + f.breakpoints.tolist()
        for t in (0.01, 0.7, 3.0):
            ref = sum(float(mpmath.quad(lambda s: f(float(s)) / s, [max(a, t), b]))
                      for a, b in zip(pts[:-1], pts[1:]) if b > t)
            assert hardy_tail(f)(t) == pytest.approx(ref, rel=1e-10, abs=1e-300)


def test_quadrature_paths_match_exact(rng):
    q = QuadSpec(rel_tol=1e-11)
    for _ in range(5):
        f = random_step(rng, 10)
        g = step_eval(f)
        assert np.allclose(hardy_average(g, q)(GRID), hardy_average(f)(GRID), rtol=1e-9)
        assert np.allclose(hardy_tail(g, q)(GRID), hardy_tail(f)(GRID), rtol=1e-9, atol=0)


def test_pq_identities(rng):
    q = QuadSpec(rel_tol=1e-11)
    for _ in range(10):
        f = random_step(rng, 10)
        P, Q = hardy_average(f), hardy_tail(f)
        target = P(GRID) + Q(GRID)
        assert np.allclose(hardy_average(Q, q)(GRID), target, rtol=1e-8)
        assert np.allclose(hardy_tail(P, q)(GRID), target, rtol=1e-8)


def test_duality(rng):
    q = QuadSpec(rel_tol=1e-11)
    for _ in range(10):
        f, g = random_step(rng, 10), random_step(rng, 10)
        lhs = integrate_evalfn(step_eval(g) * hardy_average(f), 0, math.inf, q)[0]
        rhs = integrate_evalfn(step_eval(f) * hardy_tail(g), 0, math.inf, q)[0]
        assert lhs == pytest.approx(rhs, rel=1e-8)


def test_reduction_identity(rng):
    q = QuadSpec(rel_tol=1e-11)
    for _ in range(10):
        f = random_step(rng, 10)
        fs = rearrange(f)
        lhs = hardy_average(reciprocal_primitive(f), q)(GRID)
        rhs = (hardy_average(fs)(1 / GRID) + hardy_tail(fs)(1 / GRID)) / GRID
        assert np.allclose(lhs, rhs, rtol=1e-8)


def test_reciprocal_primitive():
    U = reciprocal_primitive(StepFn.indicator(2.0))
    assert np.allclose(U(GRID), np.minimum(1 / GRID, 2.0), rtol=1e-15)
    assert U(1e12) < 1e-11


def test_reciprocal_primitive_dominates_unrearranged(rng):
    for _ in range(50):
        f = random_step(rng, 15)
        assert np.all(reciprocal_primitive(f, False)(GRID)
                      <= reciprocal_primitive(f)(GRID) * (1 + 1e-14))


def test_integrate():
    assert integrate(StepFn.indicator(5.0), 0, math.inf) == (5.0, 0.0)
    g = EvalFn(lambda t: t ** -2.0, "decreasing", Envelope(1.0, 2.0, 1.0))
    val, err = integrate(g, 1.0, math.inf)
    assert val == pytest.approx(1.0, rel=1e-9) and err < 1e-8
    with pytest.raises(ValueError):
        integrate(g, 2.0, 1.0)
    bare = EvalFn(lambda t: t ** -2.0, "decreasing")
    with pytest.raises(ValueError):
        integrate(bare, 1.0, math.inf)


def test_hardy_littlewood(rng):
    for _ in range(200):
        f, g = random_step(rng, 20), random_step(rng, 20)
        assert (f * g).integral() <= (rearrange(f) * rearrange(g)).integral() * (1 + 1e-12)


def test_evalfn_check_detects_bad_flags():
    g = EvalFn(lambda t: t, "decreasing")
    with pytest.raises(ValueError):
        g.check()
    h = EvalFn(lambda t: 1 / t, "decreasing", Envelope(0.5, 1.0, 1.0))
    with pytest.raises(ValueError):
        h.check()
    with pytest.raises(ValueError):
        EvalFn(lambda t: t, "sideways")
