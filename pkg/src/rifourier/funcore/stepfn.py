"""Nonnegative step functions on the half-line with exact rearrangement."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

__all__ = ["StepFn", "distribution", "rearrange"]


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class StepFn:
    """Right-continuous step function ``f`` on ``(0, inf)``.

    ``values[0]`` is taken on ``(0, b_1)``, ``values[i]`` on ``[b_i, b_{i+1})``
    and ``values[-1]`` on ``[b_k, inf)``.  Adjacent equal values are merged,
    so two StepFns are equal iff their arrays are equal.

    Parameters
    ----------
    breakpoints : array_like
        Strictly increasing positive reals ``b_1 < ... < b_k``.
    values : array_like
        ``k + 1`` nonnegative values.
    """

    __slots__ = ("breakpoints", "values", "_cum")

    def __init__(self, breakpoints, values):
        b = np.asarray(breakpoints, dtype=float).ravel()
        v = np.asarray(values, dtype=float).ravel()
        if v.size != b.size + 1:
            raise ValueError("need exactly one more value than breakpoints")
        if b.size and (b[0] <= 0 or np.any(np.diff(b) <= 0) or not np.isfinite(b[-1])):
            raise ValueError("breakpoints must be finite, positive and strictly increasing")
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise ValueError("values must be finite and nonnegative")
        keep = v[1:] != v[:-1]
        object.__setattr__(self, "breakpoints", _frozen(b[keep]))
        object.__setattr__(self, "values", _frozen(np.concatenate([v[:1], v[1:][keep]])))
        object.__setattr__(self, "_cum", None)

    def __setattr__(self, name, value):
        raise AttributeError("StepFn is immutable")

    # construction helpers
    @classmethod
    def indicator(cls, b, a=0.0, height=1.0):
        """``height`` times the indicator of ``(a, b)``."""
        if not 0 <= a < b < math.inf:
            raise ValueError("need 0 <= a < b < inf")
        if a == 0:
            return cls([b], [height, 0.0])
        return cls([a, b], [0.0, height, 0.0])

    @classmethod
    def from_pairs(cls, pairs):
        """Build from ``[(start, value), ...]`` with the first start equal to 0."""
        pairs = list(pairs)
        if not pairs or pairs[0][0] != 0:
            raise ValueError("first pair must start at 0")
        return cls([p[0] for p in pairs[1:]], [p[1] for p in pairs])

    def to_pairs(self):
        """Serialise as ``[(start, value), ...]``."""
        starts = [0.0] + self.breakpoints.tolist()
        return [(s, v) for s, v in zip(starts, self.values.tolist())]

    # basic properties
    @property
    def vanishes_at_infinity(self) -> bool:
        return self.values[-1] == 0.0

    @property
    def sup(self) -> float:
        return float(self.values.max())

    def pieces(self):
        """Yield ``(lo, hi, value)`` for every piece, ``hi`` possibly ``inf``."""
        edges = np.concatenate([[0.0], self.breakpoints, [math.inf]])
        for i, v in enumerate(self.values):
            yield float(edges[i]), float(edges[i + 1]), float(v)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.values[np.searchsorted(self.breakpoints, t, side="right")]
        return float(out) if out.ndim == 0 else out

    def __eq__(self, other):
        if not isinstance(other, StepFn):
            return NotImplemented
        return np.array_equal(self.breakpoints, other.breakpoints) and np.array_equal(
            self.values, other.values)

    def __hash__(self):
        return hash((self.breakpoints.tobytes(), self.values.tobytes()))

    def __repr__(self):
        return f"StepFn(breakpoints={self.breakpoints.tolist()}, values={self.values.tolist()})"

    # algebra
    def _common(self, other):
        b = np.union1d(self.breakpoints, other.breakpoints)
        starts = np.concatenate([[0.0], b])
        return b, self(starts), other(starts)

    def __add__(self, other):
        if isinstance(other, StepFn):
            b, x, y = self._common(other)
            return StepFn(b, x + y)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, StepFn):
            b, x, y = self._common(other)
            return StepFn(b, x * y)
        other = float(other)
        if other < 0:
            raise ValueError("StepFn values are nonnegative")
        return StepFn(self.breakpoints, self.values * other)

    __rmul__ = __mul__

    def __pow__(self, p):
        return StepFn(self.breakpoints, self.values ** float(p))

    def maximum(self, other):
        b, x, y = self._common(other)
        return StepFn(b, np.maximum(x, y))

    def dilate(self, s):
        """Return ``t -> f(s t)``."""
        return StepFn(self.breakpoints / float(s), self.values)

    # integrals, all exact up to final rounding
    def _cumulative(self):
        """``int_0^{b_i} f`` at every breakpoint (compensated running sum)."""
        if self._cum is None:
            b = self.breakpoints.tolist()
            v = self.values.tolist()
            out, s, comp, prev = [], 0.0, 0.0, 0.0
            for i, bi in enumerate(b):
                for term in (v[i] * bi, -v[i] * prev):
                    t = s + term
                    if abs(s) >= abs(term):
                        comp += (s - t) + term
                    else:
                        comp += (term - t) + s
                    s = t
                out.append(s + comp)
                prev = bi
            object.__setattr__(self, "_cum", _frozen(out))
        return self._cum

    def integral(self) -> float:
        """``int_0^inf f``; ``inf`` unless the function vanishes at infinity."""
        if not self.vanishes_at_infinity:
            return math.inf
        if self.breakpoints.size == 0:
            return 0.0
        return float(self._cumulative()[-1])

    def primitive(self, t):
        """``F(t) = int_0^t f`` (piecewise linear)."""
        t = np.asarray(t, dtype=float)
        cum = np.concatenate([[0.0], self._cumulative()])
        start = np.concatenate([[0.0], self.breakpoints])
        i = np.searchsorted(self.breakpoints, t, side="right")
        out = cum[i] + self.values[i] * (t - start[i])
        return float(out) if out.ndim == 0 else out

    def tail_log(self, t):
        """``int_t^inf f(s) ds / s`` (piecewise logarithmic); requires vanishing tail."""
        if not self.vanishes_at_infinity:
            raise ValueError("Q undefined: non-integrable tail")
        t = np.asarray(t, dtype=float)
        b = self.breakpoints
        if b.size == 0:
            return np.zeros_like(t) if t.ndim else 0.0
        # contribution of the full piece [b_{i-1}, b_i) for i >= 1
        logs = np.log(b[1:] / b[:-1]) * self.values[1:-1]
        suffix = np.concatenate([np.cumsum(logs[::-1])[::-1], [0.0]])
        i = np.searchsorted(b, t, side="right")
        ic = np.minimum(i, b.size - 1)
        part = np.where(i < b.size, self.values[ic] * np.log(b[ic] / t), 0.0)
        out = part + np.where(i < b.size, suffix[ic], 0.0)
        return float(out) if out.ndim == 0 else out


def _level_measures(f: StepFn):
    """Distinct positive values (descending) and exact cumulative measures."""
    if not f.vanishes_at_infinity:
        raise ValueError("infinite level sets")
    acc: dict[float, Fraction] = {}
    for lo, hi, v in f.pieces():
        if v > 0:
            acc[v] = acc.get(v, Fraction(0)) + Fraction(hi) - Fraction(lo)
    levels = sorted(acc, reverse=True)
    total, cum = Fraction(0), []
    for w in levels:
        total += acc[w]
        cum.append(float(total))
    return levels, cum


def distribution(f: StepFn) -> StepFn:
    """Distribution function ``lam -> |{f > lam}|`` as a StepFn in ``lam``."""
    levels, cum = _level_measures(f)
    # ascending levels w_1 < ... < w_J; on [w_j, w_{j+1}) the measure is |{f >= w_{j+1}}|
    return StepFn(levels[::-1], cum[::-1] + [0.0])


def rearrange(f: StepFn) -> StepFn:
    """Nonincreasing rearrangement ``f*`` computed exactly by sorting levels."""
    levels, cum = _level_measures(f)
    return StepFn(cum, levels + [0.0])
