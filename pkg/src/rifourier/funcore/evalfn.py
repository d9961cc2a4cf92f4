"""Pointwise-evaluable functions with decay envelopes, and their integrals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np

from .quadrature import QuadSpec, log_segments

__all__ = [
    "Envelope",
    "EvalFn",
    "fit_envelope",
    "integrate_evalfn",
    "cumulative_from_zero",
    "cumulative_to_infinity",
]


@dataclass(frozen=True)
class Envelope:
    """Bound ``|g(t)| <= C t^{-d}`` on ``[T0, inf)`` (tail) or ``(0, T0]`` (origin)."""

    C: float
    d: float
    T0: float

    def __call__(self, t):
        return self.C * np.asarray(t, dtype=float) ** (-self.d)

    def times(self, other: "Envelope", tail: bool) -> "Envelope":
        T0 = max(self.T0, other.T0) if tail else min(self.T0, other.T0)
        return Envelope(self.C * other.C, self.d + other.d, T0)

    def power(self, p: float) -> "Envelope":
        return Envelope(self.C ** p, self.d * p, self.T0)


@dataclass(frozen=True)
class EvalFn:
    """A function on ``(0, inf)`` given by a vectorised callable.

    Parameters
    ----------
    func : callable
        Maps an ndarray of positive reals to an ndarray of the same shape.
    monotone : {"decreasing", "increasing", "none"}
    envelope : Envelope, optional
        Decay bound towards infinity.
    origin : Envelope, optional
        Growth bound towards zero.
    breaks : tuple of float
        Points where the function is not smooth; quadrature splits there.
    closed_form : object, optional
        An equivalent closed-form representation (e.g. a pure power Weight).
    """

    func: Callable[[np.ndarray], np.ndarray]
    monotone: str = "none"
    envelope: Envelope | None = None
    origin: Envelope | None = None
    breaks: tuple = ()
    closed_form: Any = field(default=None, compare=False)

    def __post_init__(self):
        if self.monotone not in ("decreasing", "increasing", "none"):
            raise ValueError(f"unknown monotonicity flag {self.monotone!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.func(t), dtype=float)
        if out.shape != t.shape:
            out = np.broadcast_to(out, t.shape).copy()
        return float(out) if out.ndim == 0 else out

    def scaled(self, c: float) -> "EvalFn":
        c = float(c)
        env = self.envelope and replace(self.envelope, C=abs(c) * self.envelope.C)
        org = self.origin and replace(self.origin, C=abs(c) * self.origin.C)
        cf = None if self.closed_form is None else self.closed_form.scale(c)
        return EvalFn(lambda t: c * self.func(t), self.monotone, env, org, self.breaks, cf)

    def __mul__(self, other: "EvalFn") -> "EvalFn":
        env = org = None
        if self.envelope is not None and other.envelope is not None:
            env = self.envelope.times(other.envelope, tail=True)
        if self.origin is not None and other.origin is not None:
            org = self.origin.times(other.origin, tail=False)
        f, g = self.func, other.func
        return EvalFn(lambda t: f(t) * g(t), "none", env, org,
                      tuple(sorted(set(self.breaks) | set(other.breaks))))

    def power(self, p: float) -> "EvalFn":
        f = self.func
        env = self.envelope and self.envelope.power(p)
        org = self.origin and self.origin.power(p)
        mono = self.monotone if p > 0 else {"decreasing": "increasing",
                                            "increasing": "decreasing"}.get(self.monotone, "none")
        return EvalFn(lambda t: np.abs(f(t)) ** p, mono, env, org, self.breaks)

    def with_envelopes(self, q: QuadSpec = QuadSpec(), tail: bool = True,
                       origin: bool = True) -> "EvalFn":
        """Return a copy with fitted envelopes filled in where missing."""
        env = self.envelope
        org = self.origin
        if tail and env is None:
            env = fit_envelope(self, "tail")
        if origin and org is None:
            org = fit_envelope(self, "origin")
        return replace(self, envelope=env, origin=org)

    def check(self, grid=None, rtol: float = 1e-9) -> None:
        """Spot-check monotonicity and envelope domination on a grid."""
        grid = np.geomspace(1e-6, 1e6, 121) if grid is None else np.asarray(grid, dtype=float)
        y = self(grid)
        scale = np.maximum(np.abs(y[:-1]), np.abs(y[1:])) * rtol + 1e-300
        if self.monotone == "decreasing" and np.any(np.diff(y) > scale):
            raise ValueError("function flagged decreasing is not")
        if self.monotone == "increasing" and np.any(np.diff(y) < -scale):
            raise ValueError("function flagged increasing is not")
        for env, mask in ((self.envelope, lambda e: grid >= e.T0),
                          (self.origin, lambda e: grid <= e.T0)):
            if env is None:
                continue
            m = mask(env)
            if np.any(np.abs(y[m]) > env(grid[m]) * (1 + rtol) + 1e-300):
                raise ValueError("envelope does not dominate the function")


def fit_envelope(g: Callable, side: str, anchor: float | None = None,
                 decades: float = 12.0, safety: float = 2.0) -> Envelope:
    """Fit ``C t^{-d}`` to the far tail (or origin) of ``g`` by decade sampling.

    The exponent is the smallest local decay slope seen over the last four
    sampled decades; the constant is the largest ``g(t) t^d`` over the whole
    sample, times ``safety``.  Used where no analytic bound is available.
    """
    brk = [b for b in getattr(g, "breaks", ()) if b > 0]
    if side == "tail":
        start = anchor if anchor is not None else max([1e3] + [10 * b for b in brk])
        t = start * np.logspace(0, decades, int(4 * decades) + 1)
    elif side == "origin":
        start = anchor if anchor is not None else min([1e-3] + [0.1 * b for b in brk])
        t = start * np.logspace(0, -decades, int(4 * decades) + 1)
    else:
        raise ValueError("side must be 'tail' or 'origin'")
    y = np.abs(np.asarray(g(t), dtype=float))
    if not np.all(np.isfinite(y)):
        return Envelope(math.inf, 0.0, float(start))
    if np.all(y > 0):
        env_y = y
    else:
        # upper hull towards the end so that oscillation cannot fake decay
        env_y = np.maximum.accumulate(y[::-1])[::-1]
        if env_y[-1] == 0:
            last = np.nonzero(env_y > 0)[0]
            T0 = t[last[-1] + 1] if last.size else t[0]
            return Envelope(0.0, 1.0 if side == "tail" else 0.0, float(T0))
        env_y = np.maximum(env_y, 1e-300)
    lt, ly = np.log(t), np.log(env_y)
    slopes = -np.diff(ly) / np.diff(lt)
    d = float(np.min(slopes[-16:]) if side == "tail" else np.max(slopes[-16:]))
    C = safety * float(np.max(env_y * t ** d))
    return Envelope(C, d, float(start))


def _tail_cut(env: Envelope, tol: float, start: float):
    """Truncation point ``T >= start`` with envelope tail mass below ``tol``."""
    T = max(start, env.T0)
    if env.C == 0:
        return T, 0.0
    if env.d <= 1:
        return T, math.inf
    lb = math.log(env.C / (env.d - 1)) - math.log(tol)
    T = max(T, math.exp(min(lb / (env.d - 1), 690.0)))
    return T, env.C * T ** (1 - env.d) / (env.d - 1)


def _origin_cut(env: Envelope, tol: float, start: float):
    """Cut ``eps <= start`` with envelope mass on ``(0, eps)`` below ``tol``."""
    eps = min(start, env.T0)
    if env.C == 0:
        return eps, 0.0
    if env.d >= 1:
        return eps, math.inf
    lb = math.log(tol * (1 - env.d) / env.C) / (1 - env.d)
    eps = min(eps, math.exp(max(lb, -690.0)))
    return eps, env.C * eps ** (1 - env.d) / (1 - env.d)


def _need(env, what):
    if env is None:
        raise ValueError(f"envelope required for integration {what}")
    return env


def integrate_evalfn(g: EvalFn, a: float, b: float, q: QuadSpec = QuadSpec()):
    """``int_a^b g`` with ``0 <= a < b <= inf`` and a certified error.

    Infinite ends and ``a = 0`` are truncated where the envelope mass drops
    below the tolerance; the envelope mass is added to the error.  A
    non-integrable envelope yields ``(inf, inf)``.
    """
    if not 0 <= a < b:
        raise ValueError("need 0 <= a < b")
    lo_open, hi_open = a == 0, math.isinf(b)
    org = _need(g.origin, "from 0") if lo_open else None
    env = _need(g.envelope, "to infinity") if hi_open else None
    if org is not None and org.d >= 1 and org.C > 0:
        return math.inf, math.inf
    if env is not None and env.d <= 1 and env.C > 0:
        return math.inf, math.inf
    A = a if not lo_open else min(org.T0, 1.0 if hi_open else b)
    B = b if not hi_open else max(env.T0, A, 1.0)
    if A >= B:
        if lo_open:
            A = B / 10
        else:
            B = A * 10
    core, err = log_segments(g, [A], [B], q, g.breaks)
    core, err = float(core[0]), float(err[0])
    if core == 0 and (lo_open or hi_open):
        wide, _ = log_segments(g, [A * 1e-3 if lo_open else A], [B * 1e3 if hi_open else B],
                               q, g.breaks)
        scale = abs(float(wide[0]))
    else:
        scale = abs(core)
    tol = 1e-2 * max(q.abs_tol, q.rel_tol * scale)
    total = core
    if lo_open:
        eps, bound = _origin_cut(org, tol, A)
        if eps < A:
            v, e = log_segments(g, [eps], [A], q, g.breaks)
            total += float(v[0])
            err += float(e[0])
        err += bound
    if hi_open:
        T, bound = _tail_cut(env, tol, B)
        if T > B:
            v, e = log_segments(g, [B], [T], q, g.breaks)
            total += float(v[0])
            err += float(e[0])
        err += bound
    return total, err


def cumulative_from_zero(g: EvalFn, t, q: QuadSpec = QuadSpec()):
    """``int_0^{t_i} g`` for every entry of ``t`` (any shape)."""
    t = np.asarray(t, dtype=float)
    q = q.relative()
    u, inv = np.unique(t.ravel(), return_inverse=True)
    head, _ = integrate_evalfn(g, 0.0, float(u[0]), q)
    seg, _ = log_segments(g, u[:-1], u[1:], q, g.breaks)
    out = head + np.concatenate([[0.0], np.cumsum(seg)])
    return out[inv].reshape(t.shape)


def cumulative_to_infinity(g: EvalFn, t, q: QuadSpec = QuadSpec()):
    """``int_{t_i}^inf g`` for every entry of ``t`` (any shape)."""
    t = np.asarray(t, dtype=float)
    q = q.relative()
    u, inv = np.unique(t.ravel(), return_inverse=True)
    tail, _ = integrate_evalfn(g, float(u[-1]), math.inf, q)
    seg, _ = log_segments(g, u[:-1], u[1:], q, g.breaks)
    out = tail + np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    return out[inv].reshape(t.shape)
