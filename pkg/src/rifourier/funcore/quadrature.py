"""Batched adaptive Gauss-Kronrod (G7/K15) quadrature.

Every integral in the package is evaluated in the logarithmic variable
``x = ln t``; this module only sees finite x-intervals.  Many intervals
are integrated simultaneously so that a whole grid of primitives costs a
handful of vectorised passes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

__all__ = ["QuadSpec", "QuadratureError", "gk_segments", "log_segments"]


class QuadratureError(RuntimeError):
    """Raised when adaptive refinement exceeds its panel budget."""


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances for adaptive quadrature.

    Parameters
    ----------
    rel_tol : float
        Relative tolerance per requested integral.
    abs_tol : float
        Absolute floor, also used to place truncation points of infinite ranges.
    max_panels : int
        Cap on the total number of live panels in one batched call.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_panels: int = 2_000_000

    def relative(self) -> "QuadSpec":
        """Same tolerances without the absolute floor, for positive integrands
        whose tiny values still have to be resolved to relative accuracy."""
        return replace(self, abs_tol=1e-300)

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_panels < 1:
            raise ValueError("max_panels must be positive")


_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
W_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_wg_half = np.zeros(8)
_wg_half[1::2] = _WG
W_GAUSS = np.concatenate([_wg_half[:-1], _wg_half[::-1]])

_EPS = np.finfo(float).eps


def _rule(h, lo, hi, seg):
    c = 0.5 * (lo + hi)
    r = 0.5 * (hi - lo)
    x = c[:, None] + r[:, None] * NODES[None, :]
    fx = np.asarray(h(x, seg[:, None]), dtype=float)
    fx = np.broadcast_to(fx, x.shape)
    k = r * (fx @ W_KRONROD)
    g = r * (fx @ W_GAUSS)
    a = np.abs(r) * (np.abs(fx) @ W_KRONROD)
    return k, np.abs(k - g), a


def gk_segments(h: Callable, lo, hi, q: QuadSpec = QuadSpec()):
    """Integrate ``h(x, seg)`` over ``[lo[i], hi[i]]`` for every segment i.

    Parameters
    ----------
    h : callable
        ``h(x, seg)`` evaluated on 2-D arrays; ``seg`` holds the segment index
        of each row and broadcasts against ``x``.
    lo, hi : array_like
        Finite segment endpoints.
    q : QuadSpec

    Returns
    -------
    values, errors : ndarray
        Integral estimates and Kronrod error estimates per segment.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    n = lo.size
    if n == 0:
        return np.zeros(0), np.zeros(0)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("gk_segments needs finite endpoints")
    plo, phi, pseg = lo.copy(), hi.copy(), np.arange(n)
    k, e, a = _rule(h, plo, phi, pseg)
    while True:
        val = np.bincount(pseg, k, n)
        err = np.bincount(pseg, e, n)
        mag = np.bincount(pseg, a, n)
        tol = np.maximum.reduce([np.full(n, q.abs_tol), q.rel_tol * np.abs(val), 50 * _EPS * mag])
        bad = err > tol
        if not np.any(bad) or np.all(~np.isfinite(val[bad])):
            return val, err
        # within each unconverged segment split the panels carrying most error
        worst = np.zeros(n)
        np.maximum.at(worst, pseg, e)
        split = bad[pseg] & (e >= 0.25 * worst[pseg]) & (e > 0)
        width = np.abs(phi - plo)
        tiny = width <= 64 * _EPS * np.maximum(np.abs(plo), np.abs(phi)) + 1e-300
        if np.any(split & tiny) or pseg.size + np.count_nonzero(split) > q.max_panels:
            raise QuadratureError("non-convergent quadrature")
        keep = ~split
        mid = 0.5 * (plo[split] + phi[split])
        nlo = np.concatenate([plo[split], mid])
        nhi = np.concatenate([mid, phi[split]])
        nseg = np.concatenate([pseg[split], pseg[split]])
        nk, ne, na = _rule(h, nlo, nhi, nseg)
        plo = np.concatenate([plo[keep], nlo])
        phi = np.concatenate([phi[keep], nhi])
        pseg = np.concatenate([pseg[keep], nseg])
        k = np.concatenate([k[keep], nk])
        e = np.concatenate([e[keep], ne])
        a = np.concatenate([a[keep], na])


def log_segments(g: Callable, a, b, q: QuadSpec = QuadSpec(), breaks=()):
    """Integrate ``g(t) dt`` over ``[a[i], b[i]]`` with ``0 < a < b < inf``.

    The substitution ``t = e^x`` is applied and segments are split at the
    points in ``breaks`` (kinks of ``g``).

    Returns
    -------
    values, errors : ndarray
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.size == 0:
        return np.zeros(0), np.zeros(0)
    if np.any(a <= 0) or np.any(~np.isfinite(b)):
        raise ValueError("log_segments needs 0 < a and finite b")
    xa, xb = np.log(a), np.log(b)
    brk = np.unique(np.log(np.asarray([t for t in breaks if t > 0], dtype=float)))
    if brk.size:
        parts_lo, parts_hi, owner = [], [], []
        for i in range(a.size):
            inner = brk[(brk > xa[i]) & (brk < xb[i])]
            pts = np.concatenate([[xa[i]], inner, [xb[i]]])
            parts_lo.append(pts[:-1])
            parts_hi.append(pts[1:])
            owner.append(np.full(pts.size - 1, i))
        lo = np.concatenate(parts_lo)
        hi = np.concatenate(parts_hi)
        own = np.concatenate(owner)
    else:
        lo, hi, own = xa, xb, np.arange(a.size)

    def h(x, seg):
        t = np.exp(x)
        return g(t) * t

    v, e = gk_segments(h, lo, hi, q)
    return np.bincount(own, v, a.size), np.bincount(own, e, a.size)
