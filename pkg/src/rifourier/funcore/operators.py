"""Averaging operators on the half-line.

``hardy_average``  (Pf)(t) = t^{-1} int_0^t f
``hardy_tail``     (Qf)(t) = int_t^inf f(s) ds/s
``reciprocal_primitive``  (Uf)(t) = int_0^{1/t} f*   (or of f itself)
"""

from __future__ import annotations

import math

import numpy as np

from .evalfn import (Envelope, EvalFn, cumulative_from_zero, cumulative_to_infinity,
                     fit_envelope, integrate_evalfn)
from .quadrature import QuadSpec
from .stepfn import StepFn, rearrange

__all__ = ["hardy_average", "hardy_tail", "reciprocal_primitive", "double_star", "integrate"]


def _step_average(f: StepFn) -> EvalFn:
    b = f.breakpoints
    first = b[0] if b.size else math.inf
    env = Envelope(f.integral(), 1.0, float(b[-1])) if f.vanishes_at_infinity and b.size else None
    if f.breakpoints.size == 0 and f.values[0] == 0:
        env = Envelope(0.0, 1.0, 0.0)
    mono = "decreasing" if np.all(np.diff(f.values) <= 0) else "none"
    return EvalFn(lambda t: f.primitive(t) / t, mono, env,
                  Envelope(float(f.values[0]), 0.0, float(first)), tuple(b.tolist()))


def _quad_average(g: EvalFn, q: QuadSpec) -> EvalFn:
    org = g.origin or fit_envelope(g, "origin")
    if org.d >= 1 and org.C > 0:
        raise ValueError("P undefined: non-integrable at origin")
    g = EvalFn(g.func, g.monotone, g.envelope, org, g.breaks)

    def func(t):
        return cumulative_from_zero(g, t, q) / t

    # P g <= C t^{-d} / (1 - d) near 0; no tail bound without knowing int g
    origin = Envelope(org.C / (1 - org.d), org.d, org.T0)
    env = None
    if g.envelope is not None and g.envelope.d > 1:
        total, _ = integrate_evalfn(g, 0.0, math.inf, q)
        env = Envelope(total, 1.0, 0.0)
    mono = "decreasing" if g.monotone == "decreasing" else "none"
    return EvalFn(func, mono, env, origin, g.breaks)


def hardy_average(f, q: QuadSpec = QuadSpec()) -> EvalFn:
    """Averaging operator ``(Pf)(t) = t^{-1} int_0^t f``.

    Exact piecewise evaluation for StepFn input; quadrature for EvalFn.
    """
    if isinstance(f, StepFn):
        return _step_average(f)
    return _quad_average(f, q)


def _step_tail(f: StepFn) -> EvalFn:
    if not f.vanishes_at_infinity:
        raise ValueError("Q undefined: non-integrable tail")
    b = f.breakpoints
    if b.size == 0:
        zero = Envelope(0.0, 1.0, 0.0)
        return EvalFn(lambda t: np.zeros_like(t), "decreasing", zero, Envelope(0.0, 0.0, math.inf))
    # v0 ln(b1/t) + Qf(b1) <= (4 v0 / e + Qf(b1)) (b1/t)^{1/4} for t <= b1
    c0 = 4 * float(f.values[0]) / math.e + float(f.tail_log(b[0]))
    origin = Envelope(c0 * float(b[0]) ** 0.25, 0.25, float(b[0]))
    return EvalFn(f.tail_log, "decreasing", Envelope(0.0, 1.0, float(b[-1])), origin,
                  tuple(b.tolist()))


def _quad_tail(g: EvalFn, q: QuadSpec) -> EvalFn:
    env = g.envelope or fit_envelope(g, "tail")
    if env.d <= 0 and env.C > 0:
        raise ValueError("Q undefined: non-integrable tail")
    gs = EvalFn(lambda s: g.func(s) / s, "none", Envelope(env.C, env.d + 1, env.T0),
                None, g.breaks)

    def func(t):
        return cumulative_to_infinity(gs, t, q)

    out_env = Envelope(env.C / max(env.d, 1e-300), env.d, env.T0) if env.C > 0 else env
    return EvalFn(func, "decreasing" if g.monotone != "increasing" else "none", out_env,
                  None, g.breaks)


def hardy_tail(f, q: QuadSpec = QuadSpec()) -> EvalFn:
    """Dual averaging operator ``(Qf)(t) = int_t^inf f(s) ds / s``."""
    if isinstance(f, StepFn):
        return _step_tail(f)
    return _quad_tail(f, q)


def reciprocal_primitive(f: StepFn, rearrange_first: bool = True) -> EvalFn:
    """``t -> int_0^{1/t} f*`` (or ``int_0^{1/t} f`` when ``rearrange_first=False``).

    The result is nonincreasing, bounded by ``int f`` and by ``sup f / t``.
    """
    g = rearrange(f) if rearrange_first else f
    if not g.vanishes_at_infinity:
        raise ValueError("infinite level sets")
    top, total = g.sup, g.integral()
    brk = tuple(sorted(1.0 / g.breakpoints))
    return EvalFn(lambda t: g.primitive(1.0 / t), "decreasing",
                  Envelope(top, 1.0, 0.0), Envelope(total, 0.0, math.inf), brk)


def double_star(f: StepFn) -> EvalFn:
    """Maximal average ``f**(t) = t^{-1} int_0^t f*``."""
    ev = _step_average(rearrange(f))
    return EvalFn(ev.func, "decreasing", ev.envelope, ev.origin, ev.breaks)


def integrate(f, a: float, b: float, q: QuadSpec = QuadSpec()):
    """``int_a^b f`` with an error bound; exact for StepFn.

    Returns
    -------
    value, error : float
    """
    if not 0 <= a < b:
        raise ValueError("need 0 <= a < b")
    if isinstance(f, StepFn):
        hi = f.integral() if math.isinf(b) else f.primitive(b)
        return float(hi - f.primitive(a)) if math.isfinite(hi) else math.inf, 0.0
    if f.closed_form is not None and hasattr(f.closed_form, "integral"):
        return f.closed_form.integral(a, b, q)
    return integrate_evalfn(f, a, b, q)
