"""Piecewise power-log weights ``c t^a |ln t|^b`` and the transforms between them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .funcore import Envelope, EvalFn, QuadSpec, StepFn, fit_envelope, gk_segments

__all__ = [
    "Piece", "Weight", "ConvergenceVerdict", "primitive", "tail_p", "admissible",
    "probe_convergence", "reflect_weight", "down_dual_weight", "level_weight",
    "fourier_range_weight", "gamma_lambda_counterexample", "as_evalfn",
]

CONVERGENT, DIVERGENT = "convergent", "divergent"


@dataclass(frozen=True)
class ConvergenceVerdict:
    """Convergence of ``int u`` near 0 and near infinity."""

    at_zero: str
    at_infinity: str
    decided_by: str = "exponent rule"

    @property
    def ok(self) -> bool:
        return self.at_zero == CONVERGENT and self.at_infinity == CONVERGENT


@dataclass(frozen=True)
class Piece:
    """``c t^a |ln t|^b`` on ``[lo, hi)``."""

    lo: float
    hi: float
    c: float
    a: float
    b: float = 0.0

    def to_dict(self):
        return {"interval": [self.lo, self.hi], "c": self.c, "a": self.a, "b": self.b}


def _converges(a: float, b: float, end: str) -> bool:
    if end == "zero":
        return a > -1 or (a == -1 and b < -1)
    return a < -1 or (a == -1 and b < -1)


class Weight:
    """Nonnegative weight, piecewise of the form ``c t^a |ln t|^b``.

    Pieces with ``b != 0`` are split at ``t = 1`` so that the log factor never
    changes sign inside a piece.  ``c = 0`` is allowed, which is how step
    weights (the StepFn fallback) vanish on parts of the half-line.

    Parameters
    ----------
    pieces : iterable of Piece or tuple
        ``(lo, hi, c, a, b)`` records covering ``(0, inf)`` contiguously.
    fallback : StepFn, optional
        Step-function representation, kept when the weight came from one.
    """

    __slots__ = ("pieces", "fallback", "_lo", "_c", "_a", "_b")

    def __init__(self, pieces, fallback: StepFn | None = None):
        ps = [p if isinstance(p, Piece) else Piece(*map(float, p)) for p in pieces]
        if not ps or ps[0].lo != 0 or ps[-1].hi != math.inf:
            raise ValueError("pieces must cover (0, inf)")
        out = []
        for i, p in enumerate(ps):
            if i and p.lo != ps[i - 1].hi:
                raise ValueError("pieces must be contiguous")
            if not p.lo < p.hi:
                raise ValueError("empty piece")
            if not (p.c >= 0 and math.isfinite(p.c) and math.isfinite(p.a) and math.isfinite(p.b)):
                raise ValueError("need finite c >= 0, a, b")
            if p.b != 0 and p.lo < 1 < p.hi:
                out += [Piece(p.lo, 1.0, p.c, p.a, p.b), Piece(1.0, p.hi, p.c, p.a, p.b)]
            else:
                out.append(p)
        for p in out:
            if p.c > 0 and p.b <= -1 and 1.0 in (p.lo, p.hi):
                raise ValueError("log factor not integrable at t = 1")
        self.pieces = tuple(out)
        self.fallback = fallback
        self._lo = np.array([p.lo for p in out])
        self._c = np.array([p.c for p in out])
        self._a = np.array([p.a for p in out])
        self._b = np.array([p.b for p in out])

    # constructors
    @classmethod
    def power(cls, alpha: float, c: float = 1.0) -> "Weight":
        """``c t^alpha`` on the whole half-line."""
        return cls([Piece(0.0, math.inf, float(c), float(alpha), 0.0)])

    @classmethod
    def from_step(cls, f: StepFn) -> "Weight":
        return cls([Piece(lo, hi, v, 0.0, 0.0) for lo, hi, v in f.pieces()], fallback=f)

    @classmethod
    def from_records(cls, records) -> "Weight":
        """From ``[{"interval": [lo, hi], "c":..., "a":..., "b":...}, ...]``."""
        ps = []
        for r in records:
            lo, hi = (math.inf if isinstance(x, str) else float(x) for x in r["interval"])
            ps.append(Piece(lo, hi, float(r.get("c", 1.0)), float(r.get("a", 0.0)),
                            float(r.get("b", 0.0))))
        return cls(ps)

    def to_records(self):
        return [p.to_dict() for p in self.pieces]

    def __repr__(self):
        body = ", ".join(f"[{p.lo:g},{p.hi:g}): {p.c:g} t^{p.a:g} |ln t|^{p.b:g}"
                         for p in self.pieces)
        return f"Weight({body})"

    def __eq__(self, other):
        return isinstance(other, Weight) and self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    @property
    def is_power(self) -> bool:
        """True for a single piece ``c t^a`` with no log factor."""
        return len(self.pieces) == 1 and self.pieces[0].b == 0

    # evaluation and algebra
    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        i = np.searchsorted(self._lo, t, side="right") - 1
        b = self._b[i]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lg = np.where(b != 0, np.abs(np.log(t)) ** b, 1.0)
            out = self._c[i] * t ** self._a[i] * lg
        out = np.where(self._c[i] == 0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def reflect(self) -> "Weight":
        """``t -> u(1/t)``."""
        ps = []
        for p in reversed(self.pieces):
            lo = 0.0 if p.hi == math.inf else 1.0 / p.hi
            hi = math.inf if p.lo == 0 else 1.0 / p.lo
            ps.append(Piece(lo, hi, p.c, -p.a, p.b))
        return Weight(ps)

    def mul_power(self, gamma: float) -> "Weight":
        """``t -> t^gamma u(t)``."""
        return Weight([Piece(p.lo, p.hi, p.c, p.a + gamma, p.b) for p in self.pieces])

    def scale(self, k: float) -> "Weight":
        if k < 0:
            raise ValueError("weights are nonnegative")
        return Weight([Piece(p.lo, p.hi, p.c * k, p.a, p.b) for p in self.pieces])

    def __mul__(self, other):
        if not isinstance(other, Weight):
            return self.scale(float(other))
        cuts = sorted(set(self._lo.tolist()) | set(other._lo.tolist()))
        ps = []
        for lo, hi in zip(cuts, cuts[1:] + [math.inf]):
            p = self._piece_at(lo)
            r = other._piece_at(lo)
            ps.append(Piece(lo, hi, p.c * r.c, p.a + r.a, p.b + r.b))
        return Weight(ps)

    __rmul__ = __mul__

    def _piece_at(self, t):
        return self.pieces[int(np.searchsorted(self._lo, t, side="right")) - 1]

    def convergence(self) -> ConvergenceVerdict:
        first, last = self.pieces[0], self.pieces[-1]
        z = first.c == 0 or _converges(first.a, first.b, "zero")
        i = last.c == 0 or _converges(last.a, last.b, "inf")
        return ConvergenceVerdict(CONVERGENT if z else DIVERGENT, CONVERGENT if i else DIVERGENT)

    # integration
    def integral(self, lo, hi, q: QuadSpec = QuadSpec(), mult=None):
        """``int_lo^hi u`` (optionally times ``mult(t, k)``) for broadcast arrays.

        Parameters
        ----------
        lo, hi : array_like
            Integration limits, ``0 <= lo <= hi <= inf``.
        mult : callable, optional
            Smooth multiplier ``mult(t, k)`` where ``k`` indexes the flattened
            ``(lo, hi)`` pairs; only finite limits are supported with it.

        Returns
        -------
        value, error : ndarray or float
            Divergent integrals give ``inf``.
        """
        lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
        shape = lo.shape
        lo, hi = lo.ravel(), hi.ravel()
        if np.any(lo < 0) or np.any(hi < lo):
            raise ValueError("need 0 <= lo <= hi")
        if mult is not None and (np.any(lo == 0) or np.any(np.isinf(hi))):
            raise ValueError("multipliers need finite, positive limits")
        n = lo.size
        q = q.relative()
        val = np.zeros(n)
        err = np.zeros(n)
        segs = []
        for j, p in enumerate(self.pieces):
            A = np.maximum(lo, p.lo)
            B = np.minimum(hi, p.hi)
            idx = np.nonzero(A < B)[0]
            if idx.size == 0 or p.c == 0:
                continue
            A, B = A[idx], B[idx]
            if p.b == 0 and mult is None:
                val[idx] += _power_integral(p.c, p.a, A, B)
            elif p.b == 0:
                segs.append((2, p, np.log(A), np.log(B), idx))
            else:
                v, e = _log_piece_plan(p, A, B, idx, q, segs)
                val[idx] += v
                err[idx] += e
        if segs:
            v, e = _run_plan(segs, q, mult, n)
            val += v
            err += e
        val = val.reshape(shape)
        err = err.reshape(shape)
        if val.ndim == 0:
            return float(val), float(err)
        return val, err

    def primitive(self, t, q: QuadSpec = QuadSpec()):
        return self.integral(0.0, t, q)[0]

    def tail(self, t, p: float, q: QuadSpec = QuadSpec()):
        return self.mul_power(-p).integral(t, math.inf, q)[0]


def _power_integral(c, a, A, B):
    """``int_A^B c t^a dt`` in closed form, ``inf`` where divergent."""
    k = a + 1.0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if k == 0:
            out = c * np.log(B / A)
        else:
            lA = np.log(A)
            lB = np.log(B)
            fin = c * np.exp(k * lA) * np.expm1(k * (lB - lA)) / k
            out = np.where(A == 0, c * np.exp(k * lB) / k if k > 0 else np.inf, fin)
            out = np.where(np.isinf(B), c * np.exp(k * lA) / -k if k < 0 else np.inf, out)
    return np.where(np.isnan(out), np.inf, out)


def _log_piece_plan(p: Piece, A, B, idx, q: QuadSpec, segs):
    """Queue quadrature segments for ``c t^a |ln t|^b`` on ``[A, B]`` (one side of 1).

    Works in ``y = |ln t|`` with ``t = e^{sigma y}``.  Returns the exactly
    known contributions (log tails) and truncation bounds.
    """
    sigma = -1.0 if p.hi <= 1 else 1.0
    kp = (p.a + 1) * sigma
    with np.errstate(divide="ignore"):
        ya, yb = np.abs(np.log(A)), np.abs(np.log(B))
    y0, y1 = np.minimum(ya, yb), np.maximum(ya, yb)
    val = np.zeros(idx.size)
    err = np.zeros(idx.size)
    inner_hi = np.minimum(y1, 1.0)
    m = y0 < inner_hi
    if np.any(m):
        if p.b < 0:
            k = 1.0 / (p.b + 1.0)
            segs.append((1, p, y0[m] ** (1 / k), inner_hi[m] ** (1 / k), idx[m], sigma, kp, k))
        else:
            segs.append((0, p, y0[m], inner_hi[m], idx[m], sigma, kp))
    outer_lo = np.maximum(y0, 1.0)
    fin = np.isfinite(y1) & (outer_lo < y1)
    if np.any(fin):
        segs.append((0, p, outer_lo[fin], y1[fin], idx[fin], sigma, kp))
    inf = ~np.isfinite(y1)
    if np.any(inf):
        if not (kp < 0 or (kp == 0 and p.b < -1)):
            val[inf] = np.inf
            return val, err
        L = outer_lo[inf]
        if kp == 0:
            val[inf] = p.c * L ** (p.b + 1) / -(p.b + 1)
        else:
            kap = -kp
            S0 = np.maximum(L, 2 * p.b / kap)
            lower = p.c / kap * np.exp(-kap * S0 - 1) * np.minimum(S0 ** p.b,
                                                                   (S0 + 1 / kap) ** p.b)
            lt = np.log(1e-2 * q.rel_tol * lower)
            S = S0.copy()
            for _ in range(60):
                S = np.maximum(S0, (math.log(2 * p.c / kap) + p.b * np.log(S) - lt) / kap)
            err[inf] = 2 * p.c / kap * S ** p.b * np.exp(-kap * S)
            segs.append((0, p, L, S, idx[inf], sigma, kp))
    return val, err


def _run_plan(segs, q: QuadSpec, mult, n):
    los, his, owner, mode, cc, aa, bb, sg, kk, kexp = ([] for _ in range(10))
    for s in segs:
        kind, p, lo, hi, idx = s[:5]
        keep = lo < hi
        lo, hi, idx = lo[keep], hi[keep], idx[keep]
        if lo.size == 0:
            continue
        m = lo.size
        los.append(lo)
        his.append(hi)
        owner.append(idx)
        mode.append(np.full(m, kind))
        cc.append(np.full(m, p.c))
        aa.append(np.full(m, p.a))
        bb.append(np.full(m, p.b))
        sg.append(np.full(m, s[5] if kind != 2 else 1.0))
        kk.append(np.full(m, s[6] if kind != 2 else p.a + 1))
        kexp.append(np.full(m, s[7] if kind == 1 else 1.0))
    if not los:
        return np.zeros(n), np.zeros(n)
    lo, hi, own = map(np.concatenate, (los, his, owner))
    mode, c, a, b, sig, kp, kx = map(np.concatenate, (mode, cc, aa, bb, sg, kk, kexp))

    def h(x, seg):
        md = mode[seg]
        y = np.where(md == 1, np.abs(x) ** kx[seg], x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            logfac = np.where(md == 0, np.abs(y) ** b[seg], np.where(md == 1, kx[seg], 1.0))
            out = c[seg] * np.exp(kp[seg] * y) * logfac
            if mult is not None:
                t = np.exp(np.where(md == 2, y, sig[seg] * y))
                out = out * mult(t, own[seg])
        return np.where(np.isnan(out), 0.0, out)

    v, e = gk_segments(h, lo, hi, q)
    return np.bincount(own, v, n), np.bincount(own, e, n)


def primitive(u: Weight, t, q: QuadSpec = QuadSpec()):
    """``int_0^t u``; ``inf`` where the weight is not integrable at 0."""
    return u.primitive(t, q)


def tail_p(u: Weight, t, p: float, q: QuadSpec = QuadSpec()):
    """``int_t^inf u(s) s^{-p} ds``; ``inf`` where divergent."""
    return u.tail(t, p, q)


def admissible(u: Weight, p: float) -> ConvergenceVerdict:
    """Convergence of ``int u(t) (1+t)^{-p} dt`` by the exponent rule."""
    v0 = u.convergence()
    vi = u.mul_power(-p).convergence()
    return ConvergenceVerdict(v0.at_zero, vi.at_infinity)


def probe_convergence(u: Weight, q: QuadSpec = QuadSpec(), near: float = 1e3,
                      far: float = 1e6, points: int = 40) -> ConvergenceVerdict:
    """Decide convergence at both ends from decade masses computed by quadrature.

    The masses of ``u`` over the decades ``10^k, ..., 10^{k+1}`` (``near <= k
    <= far``, geometrically spaced) are computed in normalised logarithmic
    form and fitted by ``slope k + beta ln k``.  The end converges when the
    slope is negative, or, when the slope vanishes, when ``beta < -1``.
    """
    verdict = {}
    for end, pc in (("zero", u.pieces[0]), ("inf", u.pieces[-1])):
        if pc.c == 0:
            verdict[end] = CONVERGENT
            continue
        sgn = -1.0 if end == "zero" else 1.0
        ks = np.unique(np.geomspace(near, far, points).round())
        x0 = ks * math.log(10)
        # log of c e^{(a+1) x} |x|^b with x = sgn * y, normalised at each decade start
        kap = (pc.a + 1) * sgn

        def h(y, seg, x0=x0, kap=kap, pc=pc):
            base = x0[seg]
            return np.exp(kap * (y - base) + pc.b * (np.log(y) - np.log(base)))

        vals, _ = gk_segments(h, x0, x0 + math.log(10), q)
        logm = np.log(vals) + kap * x0 + pc.b * np.log(x0)
        design = np.column_stack([ks, np.log(ks), np.ones_like(ks)])
        slope, beta, _ = np.linalg.lstsq(design, logm, rcond=None)[0]
        if abs(slope) > 1e-8:
            verdict[end] = CONVERGENT if slope < 0 else DIVERGENT
        else:
            verdict[end] = CONVERGENT if beta < -1 else DIVERGENT
    return ConvergenceVerdict(verdict["zero"], verdict["inf"], "quadrature")


def as_evalfn(u: Weight) -> EvalFn:
    """Wrap a weight as an EvalFn with fitted decay envelopes."""
    base = EvalFn(u, "none", breaks=tuple(float(x) for x in u._lo[1:]))
    ev = EvalFn(u, "none", fit_envelope(base, "tail"), fit_envelope(base, "origin"), base.breaks,
                closed_form=u)
    return ev


def reflect_weight(u: Weight, p: float) -> Weight:
    """``u_p(t) = u(1/t) t^{p-2}``; an involution on the weight family."""
    return u.reflect().mul_power(p - 2)


def _single_power(u: Weight):
    if u.is_power:
        pc = u.pieces[0]
        return pc.c, pc.a
    return None


def _log_bracket(u: Weight, t, p: float, q: QuadSpec):
    """``ln int_0^t u`` and ``ln int_t^inf u s^{-p}`` on an array of ``t``."""
    V = u.primitive(t, q)
    T = u.tail(t, p, q)
    with np.errstate(divide="ignore"):
        return np.log(V), np.log(T)


def down_dual_weight(v: Weight, q_exp: float, q: QuadSpec = QuadSpec()) -> EvalFn:
    """Dual weight attached to ``v`` for exponent ``q_exp`` (needs ``int v = inf``).

    ``t^{q'+q-1} V(t) T(t) / (V(t) + t^q T(t))^{q'+1}`` with ``V`` the primitive
    of ``v``, ``T(t) = int_t^inf v(s) s^{-q} ds`` and ``q' = q/(q-1)``.
    """
    if q_exp <= 1:
        raise ValueError("exponent must exceed 1")
    cv = v.convergence()
    if cv.at_zero == DIVERGENT:
        raise ValueError("weight not integrable at 0")
    if cv.at_infinity == CONVERGENT:
        raise ValueError("v' undefined: finite total mass")
    if admissible(v, q_exp).at_infinity == DIVERGENT:
        raise ValueError("tail integral diverges")
    qq = q_exp
    qp = qq / (qq - 1)

    def func(t):
        t = np.asarray(t, dtype=float)
        lV, lT = _log_bracket(v, t, qq, q)
        lt = np.log(t)
        out = (qp + qq - 1) * lt + lV + lT - (qp + 1) * np.logaddexp(lV, qq * lt + lT)
        return np.exp(out)

    closed = None
    sp = _single_power(v)
    if sp is not None:
        c, beta = sp
        const = c ** (1 - qp) * ((beta + 1) * (qq - beta - 1)) ** qp / qq ** (qp + 1)
        closed = Weight.power(-beta / (qq - 1), const)
    return _weight_handle(func, v, closed)


def _weight_handle(func, u: Weight, closed: Weight | None) -> EvalFn:
    brk = tuple(float(x) for x in u._lo[1:])
    if closed is not None:
        ev = as_evalfn(closed)
        return EvalFn(func, "none", ev.envelope, ev.origin, brk, closed_form=closed)
    base = EvalFn(func, "none", breaks=brk)
    return EvalFn(func, "none", fit_envelope(base, "tail"), fit_envelope(base, "origin"), brk)


def level_weight(u: Weight, p: float, q: QuadSpec = QuadSpec()) -> EvalFn:
    """``p t^{p-1} int_t^inf u(s) s^{-p} ds``, whose primitive is the Gamma bracket."""
    if admissible(u, p).at_infinity == DIVERGENT:
        raise ValueError("divergent tail")

    def func(t):
        t = np.asarray(t, dtype=float)
        return p * t ** (p - 1) * u.tail(t, p, q)

    closed = None
    sp = _single_power(u)
    if sp is not None:
        c, a = sp
        closed = Weight.power(a, p * c / (p - a - 1))
    return _weight_handle(func, u, closed)


def fourier_range_weight(u: Weight, p: float, q: QuadSpec = QuadSpec()) -> EvalFn:
    """``p t^{p-1} int_{1/t}^inf u(s) s^{-p} ds``, the level weight reflected."""
    if admissible(u, p).at_infinity == DIVERGENT:
        raise ValueError("divergent tail")

    def func(t):
        t = np.asarray(t, dtype=float)
        return p * t ** (p - 1) * u.tail(1.0 / t, p, q)

    closed = None
    sp = _single_power(u)
    if sp is not None:
        c, a = sp
        closed = Weight.power(2 * p - 2 - a, p * c / (p - a - 1))
    brk = tuple(sorted(1.0 / float(x) for x in u._lo[1:]))
    if closed is not None:
        ev = as_evalfn(closed)
        return EvalFn(func, "none", ev.envelope, ev.origin, brk, closed_form=closed)
    base = EvalFn(func, "none", breaks=brk)
    return EvalFn(func, "none", fit_envelope(base, "tail"), fit_envelope(base, "origin"), brk)


def gamma_lambda_counterexample(p: float, alpha: float) -> Weight:
    """Weight separating the Gamma and Lambda norms.

    ``t^{2p-1} (ln 1/t)^{-alpha}`` on ``(0, 1)`` and ``t^{p-1-alpha}`` on ``[1, inf)``.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    return Weight([Piece(0.0, 1.0, 1.0, 2 * p - 1, -alpha),
                   Piece(1.0, math.inf, 1.0, p - 1 - alpha, 0.0)])
