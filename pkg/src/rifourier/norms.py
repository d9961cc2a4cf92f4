"""Rearrangement-invariant norms evaluated on step functions and decreasing EvalFns.

Every norm is computed from the nonincreasing rearrangement of its argument.
A StepFn argument is rearranged exactly; an EvalFn argument is taken to be
already nonincreasing (it plays the role of ``f*``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .funcore import (Envelope, EvalFn, QuadSpec, StepFn, cumulative_from_zero, double_star,
                      fit_envelope, hardy_average, integrate_evalfn, rearrange,
                      reciprocal_primitive)
from .orlicz import ComposedN, NFunction, luxemburg_gauge
from .weights import DIVERGENT, Weight, admissible, as_evalfn

__all__ = [
    "Lebesgue", "Lambda", "Gamma", "Orlicz", "Convexified", "KInterpolation", "LargestDomain",
    "NormSpec", "norm", "gamma_norm", "lambda_norm", "luxemburg_norm", "convexify",
    "k_functional", "k_interpolation_norm", "largest_domain_norm", "fundamental_function",
]


def _check_exponent(p, lo=1.0):
    if not (p >= lo and math.isfinite(p)):
        raise ValueError(f"exponent must be finite and >= {lo}")


@dataclass(frozen=True)
class Lebesgue:
    p: float

    def __post_init__(self):
        _check_exponent(self.p)


@dataclass(frozen=True)
class Lambda:
    """``(int f*^p u)^{1/p}``."""

    p: float
    u: Union[Weight, EvalFn]

    def __post_init__(self):
        _check_exponent(self.p)
        if isinstance(self.u, Weight) and self.u.convergence().at_zero == DIVERGENT:
            raise ValueError("weight not integrable at 0")


@dataclass(frozen=True)
class Gamma:
    """``(int f**^p u)^{1/p}``; needs ``int u (1+t)^{-p} < inf``."""

    p: float
    u: Union[Weight, EvalFn]

    def __post_init__(self):
        _check_exponent(self.p)
        if self.p == 1:
            raise ValueError("Gamma norms need p > 1")
        if isinstance(self.u, Weight) and not admissible(self.u, self.p).ok:
            raise ValueError("inadmissible weight")


@dataclass(frozen=True)
class Orlicz:
    phi: NFunction


@dataclass(frozen=True)
class Convexified:
    """``f -> base(f^p)^{1/p}``."""

    base: "NormSpec"
    p: float

    def __post_init__(self):
        _check_exponent(self.p)


@dataclass(frozen=True)
class KInterpolation:
    """``f -> mu(t^{-1} (int_0^{t^p} f*^p)^{1/p})``."""

    mu: "NormSpec"
    p: float

    def __post_init__(self):
        _check_exponent(self.p)


@dataclass(frozen=True)
class LargestDomain:
    """``f -> base(t -> int_0^{1/t} f*)``."""

    base: "NormSpec"


NormSpec = Union[Lebesgue, Lambda, Gamma, Orlicz, Convexified, KInterpolation, LargestDomain]


def convexify(base: NormSpec, p: float) -> Convexified:
    """Convexification ``f -> base(f^p)^{1/p}``."""
    return Convexified(base, float(p))


# ---------------------------------------------------------------- helpers

def _weight_fn(u) -> EvalFn:
    if isinstance(u, Weight):
        return as_evalfn(u)
    if u.envelope is None or u.origin is None:
        return u.with_envelopes()
    return u


def _closed(u):
    """Weight form of ``u`` when available."""
    if isinstance(u, Weight):
        return u
    return u.closed_form if isinstance(u.closed_form, Weight) else None


def _integral(h: EvalFn, q: QuadSpec) -> float:
    """``int_0^inf h`` with envelopes fitted where missing."""
    if h.envelope is None or h.origin is None:
        h = h.with_envelopes(q)
    return integrate_evalfn(h, 0.0, math.inf, q.relative())[0]


def _step_as_evalfn(f: StepFn) -> EvalFn:
    b = f.breakpoints
    env = Envelope(0.0, 1.0, float(b[-1]) if b.size else 0.0)
    org = Envelope(float(f.values[0]), 0.0, float(b[0]) if b.size else math.inf)
    return EvalFn(f, "decreasing", env, org, tuple(b.tolist()))


def _decreasing(f) -> EvalFn:
    if isinstance(f, StepFn):
        return _step_as_evalfn(rearrange(f))
    if f.monotone != "decreasing":
        raise ValueError("EvalFn arguments must be flagged decreasing (they stand for f*)")
    return f


# ---------------------------------------------------------------- norms

def lebesgue_norm(p: float, f, q: QuadSpec = QuadSpec()) -> float:
    if isinstance(f, StepFn):
        if f.values.max() == 0:
            return 0.0
        if not f.vanishes_at_infinity:
            return math.inf
        return math.fsum(v ** p * (hi - lo) for lo, hi, v in f.pieces() if v > 0) ** (1 / p)
    return _integral(_decreasing(f).power(p), q) ** (1 / p)


def lambda_norm(p: float, u, f, q: QuadSpec = QuadSpec()) -> float:
    """``(int f*^p u)^{1/p}``; exact weight integrals for Weight ``u``."""
    w = _closed(u)
    if isinstance(f, StepFn) and w is not None:
        g = rearrange(f)
        if g.values.max() == 0:
            return 0.0
        lo = np.concatenate([[0.0], g.breakpoints])
        hi = np.concatenate([g.breakpoints, [math.inf]])
        v = g.values
        m = v > 0
        mass, _ = w.integral(lo[m], hi[m], q)
        return float(np.sum(v[m] ** p * mass)) ** (1 / p)
    return _integral(_decreasing(f).power(p) * _weight_fn(u), q) ** (1 / p)


def gamma_norm(p: float, u, f, q: QuadSpec = QuadSpec()) -> float:
    """``(int f**^p u)^{1/p}``.

    For a StepFn and a Weight the integral is split at the breakpoints of
    ``f*``: a constant head, a tail ``F^p int t^{-p} u`` and, in between,
    weight integrals against the multiplier ``(A/t + v)^p``.
    """
    w = _closed(u)
    if isinstance(f, StepFn) and w is not None:
        g = rearrange(f)
        if g.values.max() == 0:
            return 0.0
        if not g.vanishes_at_infinity:
            raise ValueError("infinite level sets")
        b = g.breakpoints
        v = g.values
        F = g.primitive(b)
        total = v[0] ** p * w.integral(0.0, b[0], q)[0]
        total += F[-1] ** p * w.tail(b[-1], p, q)
        if b.size > 1:
            A = F[:-1] - v[1:-1] * b[:-1]
            V = v[1:-1]

            def mult(t, k):
                return (A[k] / t + V[k]) ** p

            mid, _ = w.integral(b[:-1], b[1:], q, mult=mult)
            total += float(np.sum(mid))
        return float(total) ** (1 / p)
    if isinstance(f, StepFn):
        avg = double_star(f)
    else:
        avg = hardy_average(_decreasing(f), q)
    return _integral(avg.power(p) * _weight_fn(u), q) ** (1 / p)


def luxemburg_norm(phi: NFunction, f, q: QuadSpec = QuadSpec()) -> float:
    """Luxemburg gauge ``inf{lam : int Phi(f/lam) <= 1}`` by bisection."""
    if isinstance(f, StepFn):
        if not f.vanishes_at_infinity and f.values[-1] > 0:
            return math.inf
        lens, vals = [], []
        for lo, hi, v in f.pieces():
            if v > 0:
                lens.append(hi - lo)
                vals.append(v)
        return luxemburg_gauge(phi, vals, lens)
    g = _decreasing(f)

    def modular(lam):
        h = EvalFn(lambda t: phi(g.func(t) / lam), "decreasing", breaks=g.breaks)
        return _integral(h, q)

    top = float(g(np.array([1e-12]))[0])
    lo = hi = top if top > 0 else 1.0
    for _ in range(400):
        if modular(hi) <= 1:
            break
        hi *= 4
    else:
        raise ValueError("modular never <= 1")
    for _ in range(400):
        if modular(lo) > 1:
            break
        lo /= 4
    while hi / lo - 1 > 1e-10:
        mid = math.sqrt(lo * hi)
        lo, hi = (mid, hi) if modular(mid) > 1 else (lo, mid)
    return math.sqrt(lo * hi)


def k_functional(f: StepFn, t, p: float = 2.0):
    """``(int_0^{t^p} f*^p)^{1/p}``, the (L_p, L_inf) K-functional up to equivalence."""
    g = rearrange(f) ** p
    return g.primitive(np.asarray(t, dtype=float) ** p) ** (1 / p)


def _reciprocal_test(spec: NormSpec, q: QuadSpec) -> float:
    h = EvalFn(lambda t: 1.0 / (1.0 + t), "decreasing", Envelope(1.0, 1.0, 0.0),
               Envelope(1.0, 0.0, math.inf))
    return norm(spec, h, q)


def _k_inner(f, p: float, q: QuadSpec) -> EvalFn:
    if isinstance(f, StepFn):
        g = rearrange(f)
        gp = g ** p
        top = g.sup
        total = gp.integral()
        b = g.breakpoints
        brk = tuple((b ** (1 / p)).tolist())
        env = Envelope(total ** (1 / p), 1.0, 0.0)
        org = Envelope(top, 0.0, float(b[0]) ** (1 / p) if b.size else math.inf)
        return EvalFn(lambda t: gp.primitive(t ** p) ** (1 / p) / t, "decreasing", env, org, brk)
    g = _decreasing(f).power(p)

    def func(t):
        return cumulative_from_zero(g, t ** p, q) ** (1 / p) / t

    return EvalFn(func, "decreasing", breaks=tuple(b ** (1 / p) for b in g.breaks))


def k_interpolation_norm(mu: NormSpec, p: float, f, q: QuadSpec = QuadSpec()) -> float:
    """``mu`` applied to ``t -> t^{-1} K(t, f)``; requires ``mu(1/(1+t)) < inf``."""
    if not math.isfinite(_reciprocal_test(mu, q)):
        raise ValueError("hypothesis failed: mu(1/(1+t)) is infinite")
    return norm(mu, _k_inner(f, p, q), q)


def largest_domain_norm(base: NormSpec, f, q: QuadSpec = QuadSpec()) -> float:
    """``base`` applied to ``t -> int_0^{1/t} f*``; requires ``base(1/(1+t)) < inf``."""
    if not math.isfinite(_reciprocal_test(base, q)):
        raise ValueError("hypothesis failed: base(1/(1+t)) is infinite")
    if isinstance(f, StepFn):
        g = reciprocal_primitive(f)
    else:
        h = _decreasing(f)
        g = EvalFn(lambda t: cumulative_from_zero(h, 1.0 / t, q), "decreasing",
                   breaks=tuple(sorted(1.0 / b for b in h.breaks)))
    return norm(base, g, q)


def norm(spec: NormSpec, f, q: QuadSpec = QuadSpec()) -> float:
    """Evaluate ``spec`` on a StepFn or on a nonincreasing EvalFn."""
    if isinstance(spec, Lebesgue):
        return lebesgue_norm(spec.p, f, q)
    if isinstance(spec, Lambda):
        return lambda_norm(spec.p, spec.u, f, q)
    if isinstance(spec, Gamma):
        return gamma_norm(spec.p, spec.u, f, q)
    if isinstance(spec, Orlicz):
        return luxemburg_norm(spec.phi, f, q)
    if isinstance(spec, Convexified):
        if isinstance(f, StepFn):
            return norm(spec.base, f ** spec.p, q) ** (1 / spec.p)
        return norm(spec.base, _decreasing(f).power(spec.p), q) ** (1 / spec.p)
    if isinstance(spec, KInterpolation):
        return k_interpolation_norm(spec.mu, spec.p, f, q)
    if isinstance(spec, LargestDomain):
        return largest_domain_norm(spec.base, f, q)
    raise TypeError(f"unknown norm spec {spec!r}")


def fundamental_function(spec: NormSpec, t, q: QuadSpec = QuadSpec()):
    """Norm of the indicator of ``(0, t)``, vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    if isinstance(spec, Lebesgue):
        out = t ** (1 / spec.p)
    elif isinstance(spec, Gamma) and _closed(spec.u) is not None:
        w = _closed(spec.u)
        out = (w.primitive(t, q) + t ** spec.p * w.tail(t, spec.p, q)) ** (1 / spec.p)
    elif isinstance(spec, Lambda) and _closed(spec.u) is not None:
        out = _closed(spec.u).primitive(t, q) ** (1 / spec.p)
    elif isinstance(spec, Orlicz):
        out = spec.phi.fundamental(t)
    elif isinstance(spec, Convexified):
        out = fundamental_function(spec.base, t, q) ** (1 / spec.p)
    else:
        flat = [norm(spec, StepFn.indicator(float(x)), q) for x in t.ravel()]
        out = np.array(flat).reshape(t.shape)
    return float(out) if out.ndim == 0 else out


def orlicz_of_square(phi: NFunction) -> Orlicz:
    """Orlicz norm of ``x -> Phi(x^2)``, equal to the square-convexified Orlicz norm."""
    return Orlicz(ComposedN(phi, 2.0))
