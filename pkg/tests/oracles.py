"""Independent reference computations used by the tests."""

import math
from fractions import Fraction

import numpy as np


def sort_rearrangement(f):
    """Sort all (value, length) pairs descending and concatenate; merges equal values."""
    pairs = [(Fraction(v), Fraction(hi) - Fraction(lo)) for lo, hi, v in f.pieces() if v > 0]
    pairs.sort(key=lambda x: -x[0])
    starts, vals, pos = [], [], Fraction(0)
    for v, length in pairs:
        if vals and vals[-1] == v:
            pos += length
            continue
        if vals:
            starts.append(pos)
        vals.append(v)
        pos += length
    if vals:
        starts.append(pos)
    return [float(s) for s in starts], [float(v) for v in vals] + [0.0]


def level_set_measure(f, lam):
    """|{t : f(t) > lam}| by direct interval arithmetic."""
    return float(sum(Fraction(hi) - Fraction(lo) for lo, hi, v in f.pieces() if v > lam))


def riemann_average(f, t, n=64):
    """Average of f over (0, t): midpoint Riemann sums on the refinement of
    (0, t) by the breakpoints, ``n`` cells per refined interval."""
    out = []
    for x in np.atleast_1d(t):
        edges = np.concatenate([[0.0], f.breakpoints[f.breakpoints < x], [x]])
        terms = []
        for a, b in zip(edges[:-1], edges[1:]):
            h = (b - a) / n
            terms.extend((f(a + (np.arange(n) + 0.5) * h) * h).tolist())
        out.append(math.fsum(terms) / x)
    return np.array(out)
