import math
import warnings

import numpy as np
import pytest
import sympy as sp

from rifourier.conditions import (CheckReport, check_dilation_integral,
                                  check_fundamental_suffix_sup, check_gamma_eq_lambda,
                                  check_gamma_fourier_conditions, check_interp_L2,
                                  classify_ratio, dilation_norm_h, estimate_indices,
                                  fundamental_weight, log_grid, log_growth_exponent)
from rifourier.funcore import StepFn
from rifourier.norms import Gamma, Lambda, Lebesgue, Orlicz, fundamental_function
from rifourier.orlicz import power
from rifourier.weights import Piece, Weight, gamma_lambda_counterexample


def test_log_grid():
    g = log_grid(1e-2, 1e2, 5)
    assert g.size == 21 and g[0] == pytest.approx(1e-2) and g[-1] == pytest.approx(1e2)


def test_classify_ratio_rules():
    t = log_grid(1e-4, 1e4, 10)
    assert classify_ratio(t, np.ones_like(t), 10)[0] == "holds"
    assert classify_ratio(t, np.log(1 / t) + 20, 10)[0] == "fails"
    assert classify_ratio(t, np.where(t > 1, np.inf, 1.0), 10)[0] == "fails"
    wiggle = 1 + 0.2 * np.sin(np.log(t) * 3)
    assert classify_ratio(t, wiggle, 10)[0] == "inconclusive"


@pytest.mark.parametrize("p, a", [(2.0, 0.0), (3.0, 0.5), (4.0, -0.5), (2.5, 1.2)])
def test_gamma_eq_lambda_powers(p, a):
    rep = check_gamma_eq_lambda(p, Weight.power(a))
    assert rep.verdict == "holds"
    assert rep.sup_ratio == pytest.approx((a + 1) / (p - a - 1), rel=1e-9)


def test_gamma_eq_lambda_compact_weight_holds():
    rep = check_gamma_eq_lambda(2.0, Weight.from_step(StepFn.indicator(1.0)))
    assert rep.verdict == "holds"


def test_gamma_eq_lambda_divergent_primitive():
    with pytest.raises(ValueError, match="divergent primitive"):
        check_gamma_eq_lambda(2.0, Weight.power(-1.5))


def test_counterexample_reports_log_growth():
    rep = check_gamma_eq_lambda(4.0, gamma_lambda_counterexample(2.0, 0.5))
    assert rep.verdict == "fails"
    assert rep.details["log_growth_exponent"] == pytest.approx(1.0, rel=0.1)
    assert rep.series["ratio"].shape == rep.series["t"].shape


def test_log_growth_exponent_exact():
    t = np.geomspace(1e-8, 1e-2, 30)
    assert log_growth_exponent(t, 3 * np.log(1 / t) ** 1.5, 1e-8, 1e-2) == pytest.approx(1.5)


def _interp_oracle(p, a):
    """Exponent comparison for power weights: holds iff -1 < a < p/2 - 1."""
    return "holds" if -1 < a < p / 2 - 1 else "fails"


@pytest.mark.parametrize("p", [2.0, 3.0, 5.0])
def test_interp_l2_flip(p):
    for a in (p / 2 - 1.7, p / 2 - 1.2, p / 2 - 1.05, p / 2 - 0.95, p / 2 - 0.5):
        if a <= -1:
            continue
        assert check_interp_L2(p, Weight.power(a)).verdict == _interp_oracle(p, a)


def test_interp_l2_boundary_fails_and_errors():
    assert check_interp_L2(3.0, Weight.power(0.5)).verdict == "fails"
    with pytest.raises(ValueError):
        check_interp_L2(1.5, Weight.power(0.0))
    with pytest.raises(ValueError, match="hypothesis"):
        check_interp_L2(3.0, Weight.power(-1.0))


def test_interp_l2_implies_gamma_eq_lambda():
    rng = np.random.default_rng(8)
    for _ in range(20):
        p = rng.uniform(2, 6)
        u = Weight([Piece(0, 1, 1, rng.uniform(-0.9, p / 2 - 1.1), 0),
                    Piece(1, math.inf, rng.uniform(0.5, 2), rng.uniform(-0.9, p / 2 - 1.1), 0)])
        if check_interp_L2(p, u).verdict == "holds":
            assert check_gamma_eq_lambda(p, u).verdict == "holds"


def test_suffix_sup():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        good = check_fundamental_suffix_sup(3.0, Weight.power(-0.5))
        bad = check_fundamental_suffix_sup(3.0, Weight.power(0.5))
    assert good.verdict == "holds" and good.sup_ratio == pytest.approx(1.0, rel=1e-12)
    assert bad.verdict == "fails"
    comp = good.sub_reports[0]
    assert comp.criterion == "fundamental_function_dilation_bound" and comp.verdict == "holds"


def test_suffix_sup_warns_outside_indices():
    with pytest.warns(UserWarning, match="indices"):
        rep = check_fundamental_suffix_sup(3.0, gamma_lambda_counterexample(3.0, 0.5))
    assert rep.notes


def _product_exponent(p, q, a, beta):
    """Exponent of x in condition (1) for u = t^a, v = t^beta, from symbolic integrals."""
    x, y = sp.symbols("x y", positive=True)
    p, q, a, beta = map(sp.Rational, (p, q, a, beta))
    qp = q / (q - 1)
    up = y ** (p - 2 - a)
    vd = y ** (-beta / (q - 1))
    left = sp.integrate(up, (y, 0, x))
    right = sp.integrate(vd * y ** -qp, (y, x, sp.oo))
    expr = sp.powsimp(sp.expand_power_base(left ** (1 / p) * right ** (1 / qp), force=True),
                      force=True)
    return sp.simplify(sp.log(expr.subs(x, sp.E ** 2) / expr.subs(x, sp.E)))


@pytest.mark.parametrize("p, q, a, beta", [("2", "2", "0", "0"), ("3", "2", "0", "0"),
                                           ("3", "3", "1/2", "1/2"), ("4", "2", "1", "0"),
                                           ("3", "3/2", "1/2", "-1/4")])
def test_gamma_fourier_power_verdicts(p, q, a, beta):
    e = _product_exponent(p, q, a, beta)
    rep = check_gamma_fourier_conditions(float(sp.Rational(p)), float(sp.Rational(q)),
                                         Weight.power(float(sp.Rational(a))),
                                         Weight.power(float(sp.Rational(beta))))
    expect = "holds" if e == 0 else "fails"
    assert rep.verdict == expect
    assert all(s.verdict == expect for s in rep.sub_reports)


def test_gamma_fourier_closed_form_constants():
    rep = check_gamma_fourier_conditions(2.0, 2.0, Weight.power(0.0), Weight.power(0.0))
    sups = {s.criterion: s.sup_ratio for s in rep.sub_reports}
    # u_p = 1, v' = 1/8; log kernel gives x Gamma(p + 1)
    assert sups["gamma_fourier_condition_1"] == pytest.approx(1 / math.sqrt(8), rel=1e-6)
    assert sups["gamma_fourier_condition_2"] == pytest.approx(1 / math.sqrt(8), rel=1e-6)
    assert sups["gamma_fourier_condition_3"] == pytest.approx(0.5, rel=1e-6)
    assert sups["gamma_fourier_condition_4"] == pytest.approx(0.5, rel=1e-6)
    assert sups["gamma_fourier_combined"] == pytest.approx(math.pi / math.sqrt(24), rel=1e-6)


def test_gamma_fourier_hypotheses():
    with pytest.raises(ValueError):
        check_gamma_fourier_conditions(2.0, 3.0, Weight.power(0.0), Weight.power(0.0))
    finite_mass = Weight([Piece(0, 1, 1, 0, 0), Piece(1, math.inf, 1, -2, 0)])
    with pytest.raises(ValueError, match="finite total mass"):
        check_gamma_fourier_conditions(2.0, 2.0, Weight.power(0.0), finite_mass)


def test_dilation_norm_power_weights():
    u = Weight.power(0.5)
    val, _ = dilation_norm_h(2.0, u, 2.0, u, 1.0)
    assert val == pytest.approx(1.0, rel=1e-12)
    ts = [0.1, 1.0, 10.0, 1e3]
    vals = [dilation_norm_h(2.0, u, 2.0, u, t)[0] for t in ts]
    assert np.allclose(vals, np.array(ts) ** -0.75, rtol=1e-6)
    assert np.all(np.diff(vals) < 0)


def test_dilation_integral():
    rep = check_dilation_integral(2.0, Weight.power(0.5), 2.0, Weight.power(-0.5))
    assert rep.verdict == "holds"
    assert rep.details["integral"] == pytest.approx(4 / 3, rel=0.05)
    bad = check_dilation_integral(2.0, Weight.power(0.5), 2.0, Weight.power(0.0))
    assert bad.verdict == "fails"


@pytest.mark.parametrize("spec, expect", [(Lebesgue(3.0), 1 / 3), (Orlicz(power(3.0)), 1 / 3),
                                          (Gamma(3.0, Weight.power(0.5)), 0.5),
                                          (Lambda(2.0, Weight.power(0.2)), 0.6)])
def test_indices(spec, expect):
    idx = estimate_indices(spec)
    assert 0 <= idx.lower <= idx.upper <= 1
    assert idx.lower == pytest.approx(expect, abs=0.01)
    assert idx.upper == pytest.approx(expect, abs=0.01)


def test_indices_of_counterexample_in_range():
    idx = estimate_indices(Gamma(2.0, gamma_lambda_counterexample(2.0, 0.5)))
    assert 0 <= idx.lower <= idx.upper <= 1


def test_fundamental_weight():
    assert fundamental_weight(Lebesgue(2.0), 2.0) == Weight.power(0.0)
    w = fundamental_weight(Gamma(3.0, Weight.power(0.5)), 3.0)
    assert w.is_power and w.pieces[0].a == pytest.approx(0.5)
    t = np.geomspace(1e-3, 1e3, 7)
    # power weights: the rebuilt fundamental function is a constant multiple
    spec = Gamma(3.0, Weight.power(0.5))
    phi2 = fundamental_function(Gamma(3.0, fundamental_weight(spec, 3.0)), t)
    ratio = phi2 / fundamental_function(spec, t)
    assert np.ptp(ratio) / ratio.mean() < 1e-8
    # two-slope weight: equivalent, with a ratio bounded above and below
    spec = Gamma(3.0, Weight([Piece(0, 1, 1, 0, 0), Piece(1, math.inf, 1, 0.5, 0)]))
    fw = fundamental_weight(spec, 3.0)
    ratio = np.array([fundamental_function(Gamma(3.0, fw), x) for x in t]) / fundamental_function(spec, t)
    assert 1 / 4 < ratio.min() <= ratio.max() < 4


def test_report_serialises():
    rep = check_gamma_eq_lambda(2.0, Weight.power(0.0))
    d = rep.to_dict()
    assert d["criterion"] == "gamma_lambda_equivalence" and "series" not in d
    inf = CheckReport("x", "fails", math.inf, None, {}).to_dict()
    assert inf["sup_ratio"] == "inf"
