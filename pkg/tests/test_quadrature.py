import math

import mpmath
import numpy as np
import pytest
from scipy import integrate as sp_integrate

from rifourier.funcore import QuadratureError, QuadSpec, gk_segments, log_segments
from rifourier.funcore.quadrature import NODES, W_GAUSS, W_KRONROD


def test_rule_tables_are_consistent():
    assert NODES.size == 15 and W_KRONROD.size == 15
    assert math.isclose(W_KRONROD.sum(), 2.0, rel_tol=1e-15)
    assert math.isclose(W_GAUSS.sum(), 2.0, rel_tol=1e-15)
    # Kronrod rule integrates x^22 exactly on [-1, 1]
    assert math.isclose(np.dot(W_KRONROD, NODES ** 22), 2 / 23, rel_tol=1e-13)


def test_polynomial_segments_exact():
    v, e = gk_segments(lambda x, s: x ** 5 - 3 * x ** 2 + 1, [0.0, -1.0], [2.0, 3.0])
    assert np.allclose(v, [2 ** 6 / 6 - 8 + 2, (3 ** 6 - 1) / 6 - 28 + 4], rtol=1e-14)
    assert np.all(e < 1e-12)


def test_segment_column_selects_integrand():
    def h(x, seg):
        p = np.array([1.0, 2.0, 3.0])[seg]
        return x ** p

    v, _ = gk_segments(h, [0.0, 0.0, 0.0], [1.0, 1.0, 1.0])
    assert np.allclose(v, [1 / 2, 1 / 3, 1 / 4], rtol=1e-14)


@pytest.mark.parametrize("a, b", [(1e-8, 1.0), (1.0, 1e6), (0.3, 7.5)])
def test_log_segments_against_mpmath(a, b):
    def g(t):
        return t ** -0.5 * np.abs(np.log(t)) ** 0.3 / (1 + t)

    v, _ = log_segments(g, a, b, QuadSpec(rel_tol=1e-12))
    ref = float(mpmath.quad(lambda t: t ** -0.5 * abs(mpmath.log(t)) ** 0.3 / (1 + t),
                            [a, 1, b] if a < 1 < b else [a, b]))
    assert math.isclose(float(v[0]), ref, rel_tol=1e-10)


def test_log_segments_splits_at_breaks():
    g = lambda t: np.where(t < 2.0, 1.0, 0.0)
    v, _ = log_segments(g, [0.5], [5.0], breaks=(2.0,))
    assert math.isclose(v[0], 1.5, rel_tol=1e-13)


def test_against_scipy_quad_oscillatory():
    v, _ = gk_segments(lambda x, s: np.sin(40 * x) * np.exp(-x), [0.0], [10.0],
                       QuadSpec(rel_tol=1e-12))
    ref, _ = sp_integrate.quad(lambda x: math.sin(40 * x) * math.exp(-x), 0, 10, limit=500)
    assert math.isclose(v[0], ref, rel_tol=1e-9)


def test_budget_exceeded_raises():
    with pytest.raises(QuadratureError, match="non-convergent quadrature"):
        gk_segments(lambda x, s: np.sign(np.sin(1e4 * x)), [0.0], [10.0],
                    QuadSpec(rel_tol=1e-14, max_panels=50))


def test_quadspec_validation():
    with pytest.raises(ValueError):
        QuadSpec(rel_tol=0)
    with pytest.raises(ValueError):
        QuadSpec(max_panels=0)
    assert QuadSpec().relative().abs_tol < 1e-200
