"""Grid-based decision procedures for weighted integral inequalities and indices."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize

from .funcore import (EvalFn, QuadSpec, cumulative_from_zero, cumulative_to_infinity,
                      integrate_evalfn)
from .norms import Gamma, Lebesgue, NormSpec, Orlicz, fundamental_function
from .orlicz import PowerN
from .weights import (CONVERGENT, DIVERGENT, Weight, admissible, down_dual_weight,
                      reflect_weight)

__all__ = [
    "CheckReport", "IndexEstimate", "classify_ratio", "log_growth_exponent",
    "check_gamma_eq_lambda", "check_interp_L2", "check_fundamental_suffix_sup",
    "check_gamma_fourier_conditions", "dilation_norm_h", "dilation_profile",
    "check_dilation_integral", "estimate_indices", "fundamental_weight", "log_grid",
]

DRIFT = 0.05


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass
class CheckReport:
    """Outcome of one grid check.

    ``verdict`` is ``holds`` (finite and stable at both ends of the grid),
    ``fails`` (monotone growth over at least three decades at an end, or an
    infinite ratio) or ``inconclusive``.
    """

    criterion: str
    verdict: str
    sup_ratio: float
    witness: float | None
    grid: dict
    error_bound: float = 0.0
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    sub_reports: list = field(default_factory=list)
    series: dict = field(default_factory=dict, repr=False, compare=False)

    def to_dict(self):
        return {
            "criterion": self.criterion,
            "verdict": self.verdict,
            "sup_ratio": _num(self.sup_ratio),
            "witness": _num(self.witness),
            "grid": self.grid,
            "error_bound": _num(self.error_bound),
            "notes": list(self.notes),
            "details": {k: _num(v) if isinstance(v, (int, float)) else v
                        for k, v in self.details.items()},
            "sub_reports": [r.to_dict() for r in self.sub_reports],
        }


@dataclass(frozen=True)
class IndexEstimate:
    lower: float
    upper: float
    fit_quality: float

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper, "fit_quality": self.fit_quality}


def log_grid(lo: float = 1e-8, hi: float = 1e8, per_decade: int = 10):
    """Log grid with an integer number of points per decade."""
    n = int(round(math.log10(hi / lo) * per_decade)) + 1
    return np.logspace(math.log10(lo), math.log10(hi), n)


def _grid_info(t, per_decade):
    return {"kind": "log", "lo": float(t[0]), "hi": float(t[-1]), "points": int(t.size),
            "per_decade": int(per_decade)}


def _end_state(r, step, forward):
    """Relative increase over the last decade towards an end, and monotone growth flag."""
    idx = [0, step, 2 * step, 3 * step] if forward else [-1, -1 - step, -1 - 2 * step,
                                                          -1 - 3 * step]
    if max(abs(i) for i in idx) >= r.size + (0 if forward else 1):
        return 0.0, False
    marks = r[idx]
    end, inner = marks[0], marks[1]
    scale = max(abs(end), abs(inner))
    rise = 0.0 if scale == 0 else (end - inner) / scale
    growing = bool(np.all(np.diff(marks[::-1]) > 0))
    return float(rise), bool(growing and rise >= DRIFT)


def classify_ratio(t, r, per_decade: int):
    """Verdict, sup, witness and end diagnostics for a ratio sampled on a log grid."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    bad = ~np.isfinite(r)
    if np.any(bad):
        i = int(np.argmax(bad))
        return "fails", math.inf, float(t[i]), {"infinite_at": float(t[i])}
    i = int(np.argmax(r))
    rise_lo, grow_lo = _end_state(r, per_decade, True)
    rise_hi, grow_hi = _end_state(r, per_decade, False)
    info = {"drift_low_end": rise_lo, "drift_high_end": rise_hi}
    if grow_lo or grow_hi:
        verdict = "fails"
    elif rise_lo < DRIFT and rise_hi < DRIFT:
        verdict = "holds"
    else:
        verdict = "inconclusive"
    return verdict, float(r[i]), float(t[i]), info


def log_growth_exponent(t, r, lo: float, hi: float) -> float:
    """Slope of ``ln r`` against ``ln ln(1/t)`` for ``lo <= t <= hi < 1``."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    m = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    return float(np.polyfit(np.log(np.log(1 / t[m])), np.log(r[m]), 1)[0])


def _bracket_ratio(u: Weight, exponent: float, t, q: QuadSpec):
    V = u.primitive(t, q)
    if np.any(~np.isfinite(V)):
        raise ValueError("divergent primitive")
    T = u.tail(t, exponent, q)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.exp(exponent * np.log(t) + np.log(T) - np.log(V))
    r = np.where(T == 0, 0.0, r)
    r = np.where((V == 0) & (T > 0), np.inf, r)
    return r


def check_gamma_eq_lambda(exponent: float, u: Weight, q: QuadSpec = QuadSpec(),
                          t=None, per_decade: int = 10) -> CheckReport:
    """Ratio ``t^e int_t^inf u s^{-e} ds / int_0^t u`` on a log grid.

    Boundedness of this ratio is what makes the Gamma and Lambda norms with
    exponent ``e`` and weight ``u`` equivalent.
    """
    t = log_grid(per_decade=per_decade) if t is None else np.asarray(t, dtype=float)
    if u.convergence().at_zero == DIVERGENT:
        raise ValueError("divergent primitive")
    r = _bracket_ratio(u, exponent, t, q)
    verdict, sup, wit, info = classify_ratio(t, r, per_decade)
    notes = []
    if admissible(u, exponent).at_infinity == DIVERGENT:
        notes.append(f"int u(t) (1+t)^-{exponent:g} dt diverges at infinity")
    details = dict(info)
    small = (t >= 1e-8 * (1 - 1e-12)) & (t <= 1e-2 * (1 + 1e-12)) & np.isfinite(r) & (r > 0)
    if np.count_nonzero(small) >= 3:
        details["log_growth_exponent"] = log_growth_exponent(t[small], r[small], 1e-8, 1e-2)
        details["slope_vs_log_inverse_t"] = float(
            np.polyfit(np.log(1 / t[small]), r[small], 1)[0])
    return CheckReport("gamma_lambda_equivalence", verdict, sup, wit, _grid_info(t, per_decade),
                       q.rel_tol * sup if math.isfinite(sup) else math.inf, notes, details,
                       series={"t": t, "ratio": r})


def check_interp_L2(p: float, u: Weight, q: QuadSpec = QuadSpec(), t=None,
                    per_decade: int = 10) -> CheckReport:
    """Ratio test with exponent ``p/2``: is the Gamma space between L2 and L-infinity?

    A weight for which ``int u (1+t)^{-p/2}`` diverges at infinity makes the
    left side infinite; that is reported as ``fails`` with a note.
    """
    if p < 2:
        raise ValueError("need p >= 2")
    if u.convergence().at_zero == DIVERGENT:
        raise ValueError("hypothesis failed: weight not integrable at 0")
    rep = check_gamma_eq_lambda(p / 2, u, q, t, per_decade)
    rep.criterion = "l2_linf_interpolation"
    return rep


def _fundamental_power(u: Weight, p: float, t, q: QuadSpec):
    return u.primitive(t, q) + t ** p * u.tail(t, p, q)


def check_fundamental_suffix_sup(p: float, u: Weight, q: QuadSpec = QuadSpec(), t=None,
                                 per_decade: int = 10) -> CheckReport:
    """``sup_{s >= t} phi(s)^p / s <= C phi(t)^p / t`` for the Gamma fundamental function.

    A companion report checks ``phi(s) / phi(t) <= C max((s/t)^{1/p}, 1)``.
    """
    if p < 2:
        raise ValueError("need p >= 2")
    t = log_grid(per_decade=per_decade) if t is None else np.asarray(t, dtype=float)
    notes = []
    idx = estimate_indices(Gamma(p, u), q)
    if not (0 < idx.lower and idx.upper < 1):
        msg = f"fundamental indices ({idx.lower:.3f}, {idx.upper:.3f}) not inside (0, 1)"
        warnings.warn(msg)
        notes.append(msg)
    phip = _fundamental_power(u, p, t, q)
    g = phip / t
    suffix = np.maximum.accumulate(g[::-1])[::-1]
    r = suffix / g
    verdict, sup, wit, info = classify_ratio(t, r, per_decade)
    phi = phip ** (1 / p)
    ratio_mat = (phi[None, :] / phi[:, None]) / np.maximum((t[None, :] / t[:, None]) ** (1 / p), 1)
    r2 = ratio_mat.max(axis=1)
    v2, s2, w2, i2 = classify_ratio(t, r2, per_decade)
    comp = CheckReport("fundamental_function_dilation_bound", v2, s2, w2,
                       _grid_info(t, per_decade), q.rel_tol * s2, [], i2,
                       series={"t": t, "ratio": r2})
    details = dict(info)
    details.update(lower_index=idx.lower, upper_index=idx.upper)
    return CheckReport("fundamental_suffix_sup", verdict, sup, wit, _grid_info(t, per_decade),
                       q.rel_tol * sup, notes, details, [comp],
                       series={"t": t, "ratio": r, "fundamental": phi})


# ------------------------------------------------------------ dual-weight products

def _prim(w, x, q):
    if isinstance(w, Weight):
        return w.primitive(x, q)
    if isinstance(w.closed_form, Weight):
        return w.closed_form.primitive(x, q)
    return cumulative_from_zero(w.with_envelopes(q), x, q)


def _tail(w, x, r, q):
    if isinstance(w, Weight):
        return w.tail(x, r, q)
    if isinstance(w.closed_form, Weight):
        return w.closed_form.tail(x, r, q)
    env = w.with_envelopes(q)
    h = EvalFn(lambda y: env.func(y) * y ** (-r), "none", None, None, w.breaks)
    return cumulative_to_infinity(h.with_envelopes(q, origin=False), x, q)


def _kernel_integral(w, kernel, x, lo_zero: bool, hi_inf: bool, q: QuadSpec):
    """``int kernel(x, y) w(y) dy`` per grid point over (0, x), (x, inf) or (0, inf)."""
    out = np.empty(x.size)
    base = w if not isinstance(w, Weight) else None
    wf = w if isinstance(w, Weight) else w.func
    wb = tuple(float(b) for b in (w._lo[1:] if isinstance(w, Weight) else w.breaks))
    for i, xi in enumerate(x):
        def func(y, xi=xi):
            return kernel(xi, y) * wf(y)

        h = EvalFn(func, "none", breaks=tuple(sorted(set(wb) | {float(xi)})))
        h = h.with_envelopes(q, tail=hi_inf, origin=lo_zero)
        a = 0.0 if lo_zero else float(xi)
        b = math.inf if hi_inf else float(xi)
        out[i] = integrate_evalfn(h, a, b, q.relative())[0]
    del base
    return out


def check_gamma_fourier_conditions(p: float, q_exp: float, u: Weight, v: Weight,
                                   q: QuadSpec = QuadSpec(), x=None,
                                   per_decade: int = 5) -> CheckReport:
    """The four product conditions (and their combined form) for a Fourier
    inequality between Gamma spaces with exponents ``q_exp <= p``.

    With ``u_p`` the reflected weight and ``v'`` the dual weight of ``v``:

    1. ``(int_0^x u_p)^{1/p} (int_x^inf v' y^{-q'})^{1/q'}``
    2. ``(int_0^x v')^{1/q'} (int_x^inf u_p y^{-p})^{1/p}``
    3. ``(int_0^x ln(x/y)^p u_p)^{1/p} (int_x^inf v' y^{-q'})^{1/q'}``
    4. ``(int_0^x u_p)^{1/p} (int_x^inf v' (ln(y/x)/y)^{q'})^{1/q'}``

    combined: ``(int_0^inf ln(1+x/y)^p u_p)^{1/p} (int_x^inf v' y^{-q'})^{1/q'}``.
    """
    if not 1 < q_exp <= p:
        raise ValueError("need 1 < q <= p")
    up = reflect_weight(u, p)
    cu = up.convergence()
    if cu.at_zero == CONVERGENT and cu.at_infinity == CONVERGENT:
        raise ValueError("hypothesis failed: reflected weight has finite total mass")
    if cu.at_zero == DIVERGENT:
        raise ValueError("hypothesis failed: reflected weight not integrable at 0")
    vd = down_dual_weight(v, q_exp, q)
    qp = q_exp / (q_exp - 1)
    x = log_grid(1e-6, 1e6, per_decade) if x is None else np.asarray(x, dtype=float)
    U0 = up.primitive(x, q)
    U1 = up.tail(x, p, q)
    V0 = _prim(vd, x, q)
    V1 = _tail(vd, x, qp, q)
    Ulog = _kernel_integral(up, lambda xi, y: np.where(y < xi, np.log(xi / y), 0.0) ** p,
                            x, True, False, q)
    Vlog = _kernel_integral(vd, lambda xi, y: (np.maximum(np.log(y / xi), 0.0) / y) ** qp,
                            x, False, True, q)
    Ucomb = _kernel_integral(up, lambda xi, y: np.log1p(xi / y) ** p, x, True, True, q)
    products = {
        "gamma_fourier_condition_1": U0 ** (1 / p) * V1 ** (1 / qp),
        "gamma_fourier_condition_2": V0 ** (1 / qp) * U1 ** (1 / p),
        "gamma_fourier_condition_3": Ulog ** (1 / p) * V1 ** (1 / qp),
        "gamma_fourier_condition_4": U0 ** (1 / p) * Vlog ** (1 / qp),
        "gamma_fourier_combined": Ucomb ** (1 / p) * V1 ** (1 / qp),
    }
    subs = []
    for name, r in products.items():
        verdict, sup, wit, info = classify_ratio(x, r, per_decade)
        subs.append(CheckReport(name, verdict, sup, wit, _grid_info(x, per_decade),
                                q.rel_tol * sup, [], info, series={"t": x, "ratio": r}))
    four = subs[:4]
    if all(s.verdict == "holds" for s in four):
        verdict = "holds"
    elif any(s.verdict == "fails" for s in four):
        verdict = "fails"
    else:
        verdict = "inconclusive"
    sup = max(s.sup_ratio for s in four)
    wit = next(s.witness for s in four if s.sup_ratio == sup)
    notes = [] if isinstance(vd.closed_form, Weight) else ["dual weight evaluated numerically"]
    return CheckReport("gamma_fourier_conditions", verdict, sup, wit, _grid_info(x, per_decade),
                       q.rel_tol * sup, notes, {}, subs,
                       series={"t": x, **{k[len("gamma_fourier_"):]: v for k, v in products.items()}})


# ------------------------------------------------------------ dilation norm

def _bracket(w: Weight, r, expo: float, q: QuadSpec):
    val = w.primitive(r, q) + r ** expo * w.tail(r, expo, q)
    if np.any(~np.isfinite(val)):
        raise ValueError("divergent bracket")
    return val ** (1 / expo)


_S_GRID = np.geomspace(1e-10, 1e10, 400)


def dilation_profile(q_exp: float, v: Weight, p: float, u_p: Weight, ts,
                     q: QuadSpec = QuadSpec()):
    """Dilation norm estimate and maximiser for every ``t`` in ``ts``.

    ``sup_s N(s/t) / D(s)`` with ``N`` the Gamma bracket of ``u_p`` (exponent
    ``p``) and ``D`` that of ``v`` (exponent ``q_exp``).  A maximum on the
    edge of the ``s`` grid that is still rising is reported as ``inf``.
    """
    if not 1 < q_exp <= p:
        raise ValueError("need 1 < q <= p")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    s = _S_GRID
    lD = np.log(_bracket(v, s, q_exp, q))
    lN = np.log(_bracket(u_p, s[None, :] / ts[:, None], p, q))
    L = lN - lD[None, :]
    vals = np.empty(ts.size)
    arg = np.empty(ts.size)
    ls = np.log(s)
    for k, t in enumerate(ts):
        i = int(np.argmax(L[k]))
        if i in (0, s.size - 1):
            j = 20 if i == 0 else s.size - 21
            if L[k, i] - L[k, j] > 1e-6:
                vals[k], arg[k] = math.inf, s[i]
                continue
            vals[k], arg[k] = math.exp(L[k, i]), s[i]
            continue

        def neg(lx, t=t):
            sx = np.array([math.exp(lx)])
            return -(math.log(_bracket(u_p, sx / t, p, q)[0]) - math.log(
                _bracket(v, sx, q_exp, q)[0]))

        res = optimize.minimize_scalar(neg, bounds=(ls[i - 1], ls[i + 1]), method="bounded",
                                       options={"xatol": 1e-10})
        best = max(-res.fun, L[k, i])
        vals[k] = math.exp(best)
        arg[k] = math.exp(res.x) if -res.fun >= L[k, i] else s[i]
    return vals, arg


def dilation_norm_h(q_exp: float, v: Weight, p: float, u_p: Weight, t: float,
                    q: QuadSpec = QuadSpec()):
    """Norm of the dilation by ``t`` between two Gamma fundamental brackets.

    Returns
    -------
    value, argmax : float
    """
    vals, arg = dilation_profile(q_exp, v, p, u_p, [t], q)
    return float(vals[0]), float(arg[0])


def check_dilation_integral(q_exp: float, v: Weight, p: float, u: Weight,
                            q: QuadSpec = QuadSpec(), decades: int = 8,
                            per_decade: int = 10) -> CheckReport:
    """Finiteness of ``int_1^inf h(t) dt/t`` from decade masses of the dilation norm."""
    up = reflect_weight(u, p)
    t = np.logspace(0, decades, decades * per_decade + 1)
    h, _ = dilation_profile(q_exp, v, p, up, t, q)
    grid = _grid_info(t, per_decade)
    if np.any(~np.isfinite(h)):
        i = int(np.argmax(~np.isfinite(h)))
        return CheckReport("dilation_integral", "fails", math.inf, float(t[i]), grid, 0.0,
                           ["dilation norm unbounded"], {"integral": math.inf},
                           series={"t": t, "dilation_norm": h})
    lt = np.log(t)
    masses = np.array([
        sp_integrate.simpson(h[k * per_decade:(k + 1) * per_decade + 1],
                             x=lt[k * per_decade:(k + 1) * per_decade + 1])
        for k in range(decades)])
    slope = float(np.polyfit(np.arange(decades), np.log(masses), 1)[0])
    dm = np.diff(masses)
    last = dm[-3:]
    if np.all(last < 0) and slope < 0:
        verdict = "holds"
        ratio = masses[-1] / masses[-2]
        total = float(masses.sum() + masses[-1] * ratio / (1 - ratio))
    elif np.all(dm >= -1e-9 * masses[1:]):
        verdict = "fails"
        total = math.inf
    else:
        verdict = "inconclusive"
        total = float(masses.sum())
    i = int(np.argmax(h))
    details = {"integral": total, "decade_mass_log_slope": slope}
    return CheckReport("dilation_integral", verdict, float(h[i]), float(t[i]), grid,
                       q.rel_tol * total if math.isfinite(total) else math.inf,
                       [], details, series={"t": t, "dilation_norm": h})


# ------------------------------------------------------------ indices

def estimate_indices(spec: NormSpec, q: QuadSpec = QuadSpec(), per_decade: int = 10,
                     span: int = 14) -> IndexEstimate:
    """Fundamental indices from ``k(s) = sup_t phi(t/s) / phi(t)``.

    ``-ln k(s)`` is fitted linearly against ``ln s`` for ``s`` in
    ``[1e2, 1e6]`` (lower index) and ``[1e-6, 1e-2]`` (upper index).
    """
    grid = np.logspace(-span, span, 2 * span * per_decade + 1)
    lphi = np.log(fundamental_function(spec, grid, q))
    n = grid.size

    def minus_log_k(m):
        # s = 10^{m / per_decade}; t / s sits m grid steps below t
        if m >= 0:
            diff = lphi[:n - m] - lphi[m:]
        else:
            diff = lphi[-m:] - lphi[:n + m]
        return -float(np.max(diff))

    def fit(lo_dec, hi_dec):
        ms = np.arange(lo_dec * per_decade, hi_dec * per_decade + 1)
        xs = ms / per_decade * math.log(10)
        ys = np.array([minus_log_k(int(m)) for m in ms])
        coef, res, *_ = np.polyfit(xs, ys, 1, full=True)
        rms = math.sqrt(float(res[0]) / xs.size) if res.size else 0.0
        return float(coef[0]), rms

    lower, r1 = fit(2, 6)
    upper, r2 = fit(-6, -2)
    lower, upper = sorted((min(max(lower, 0.0), 1.0), min(max(upper, 0.0), 1.0)))
    return IndexEstimate(lower, upper, max(r1, r2))


def fundamental_weight(spec: NormSpec, p: float, q: QuadSpec = QuadSpec()):
    """Weight ``phi(t)^p / t`` built from the fundamental function of ``spec``.

    Pure power cases return a :class:`Weight`; otherwise an EvalFn.
    """
    closed = None
    if isinstance(spec, Lebesgue):
        closed = Weight.power(p / spec.p - 1)
    elif isinstance(spec, Orlicz) and isinstance(spec.phi, PowerN):
        closed = Weight.power(p / spec.phi.p - 1, spec.phi.scale ** (p / spec.phi.p))
    elif isinstance(spec, Gamma) and isinstance(spec.u, Weight) and spec.u.is_power:
        pc = spec.u.pieces[0]
        r = spec.p
        K = pc.c * r / ((pc.a + 1) * (r - pc.a - 1))
        closed = Weight.power(p * (pc.a + 1) / r - 1, K ** (p / r))
    idx = estimate_indices(spec, q)
    if not (0 < idx.lower and idx.upper < 1):
        warnings.warn(f"fundamental indices ({idx.lower:.3f}, {idx.upper:.3f}) not inside (0, 1)")
    if closed is not None:
        return closed

    def func(t):
        t = np.asarray(t, dtype=float)
        return fundamental_function(spec, t, q) ** p / t

    return EvalFn(func, "none").with_envelopes(q)
