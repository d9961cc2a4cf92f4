"""Radial step functions, their Fourier transforms and empirical Fourier inequalities.

A radial step function on R^n (n = 1 or 3) is ``sum_j c_j 1_{|x| < r_j}``.
The transform of a ball indicator is

    r^n (2 pi)^{n/2} J_{n/2}(2 pi r |xi|) / (2 pi r |xi|)^{n/2},

which for the half-integer orders used here is elementary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .funcore import Envelope, EvalFn, StepFn, rearrange
from .norms import NormSpec, norm

__all__ = [
    "RadialStep", "TransformProfile", "RearrangedTransform", "FourierReport", "ball_volume",
    "bessel_kernel", "radial_rearrange", "transform", "rearrange_transform", "verify_jt",
    "verify_reverse", "verify_norm_pair", "reverse_constant", "random_family",
]

SERIES_SWITCH = 0.5


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    if n == 1:
        return 2.0
    if n == 3:
        return 4 * math.pi / 3
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def _check_dim(n):
    if n not in (1, 3):
        raise ValueError(f"unsupported dimension {n}; only 1 and 3 are implemented")


def bessel_kernel(n: int, s):
    """``J_{n/2}(s) / s^{n/2}`` for n in {1, 3}, continuous at ``s = 0``."""
    _check_dim(n)
    s = np.asarray(s, dtype=float)
    c = math.sqrt(2 / math.pi)
    if n == 1:
        out = c * np.sinc(s / math.pi)
    else:
        small = np.abs(s) < SERIES_SWITCH
        ss = np.where(small, 1.0, s)
        big = (np.sin(ss) - ss * np.cos(ss)) / ss ** 3
        s2 = s * s
        ser = np.zeros_like(s)
        for k in range(10, 0, -1):
            ser = ser * s2 + (-1) ** (k + 1) * 2 * k / math.factorial(2 * k + 1)
        out = c * np.where(small, ser, big)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RadialStep:
    """``f(x) = sum_j c_j 1_{|x| < r_j}`` on R^n.

    The suffix sums of the coefficients are the values of ``f`` on the
    shells and must be nonnegative; ``f`` is radially nonincreasing when all
    coefficients are nonnegative.
    """

    n: int
    radii: tuple
    coeffs: tuple

    def __post_init__(self):
        _check_dim(self.n)
        r = np.asarray(self.radii, dtype=float)
        c = np.asarray(self.coeffs, dtype=float)
        if r.ndim != 1 or r.size == 0 or r.shape != c.shape:
            raise ValueError("radii and coefficients must be matching nonempty lists")
        if r[0] <= 0 or np.any(np.diff(r) <= 0) or not np.all(np.isfinite(r)):
            raise ValueError("radii must be positive and strictly increasing")
        if np.any(self.shell_values < -1e-12 * np.abs(c).sum()):
            raise ValueError("suffix sums of coefficients must be nonnegative")
        object.__setattr__(self, "radii", tuple(r.tolist()))
        object.__setattr__(self, "coeffs", tuple(c.tolist()))

    @property
    def shell_values(self):
        c = np.asarray(self.coeffs, dtype=float)
        return np.cumsum(c[::-1])[::-1]

    @property
    def monotone(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def integral(self) -> float:
        nu = ball_volume(self.n)
        return math.fsum(c * nu * r ** self.n for c, r in zip(self.coeffs, self.radii))

    def dilate(self, lam: float) -> "RadialStep":
        """``x -> f(lam x)``."""
        return RadialStep(self.n, tuple(r / lam for r in self.radii), self.coeffs)

    def scale(self, c: float) -> "RadialStep":
        return RadialStep(self.n, self.radii, tuple(c * x for x in self.coeffs))

    def to_dict(self):
        return {"n": self.n, "radii": list(self.radii), "coeffs": list(self.coeffs)}


def radial_rearrange(f: RadialStep) -> StepFn:
    """Nonincreasing rearrangement of ``f`` as a step function of measure."""
    nu = ball_volume(f.n)
    b = [nu * r ** f.n for r in f.radii]
    vals = np.maximum(f.shell_values, 0.0)
    return rearrange(StepFn(b, np.append(vals, 0.0)))


@dataclass(frozen=True)
class TransformProfile:
    """Radial profile of the Fourier transform with a rigorous decay envelope.

    ``|f^(xi)| <= envelope.C * xi^{-envelope.d}`` for ``xi >= envelope.T0``.
    """

    f: RadialStep
    profile: EvalFn
    envelope: Envelope

    def __call__(self, xi):
        return self.profile(xi)


def transform(f: RadialStep) -> TransformProfile:
    """Closed-form radial Fourier transform of a radial step function."""
    n = f.n
    r = np.asarray(f.radii)
    c = np.asarray(f.coeffs)
    pref = (2 * math.pi) ** (n / 2)

    def func(xi):
        xi = np.asarray(xi, dtype=float)
        s = 2 * math.pi * xi[..., None] * r
        return pref * np.sum(c * r ** n * bessel_kernel(n, s), axis=-1)

    if n == 1:
        env = Envelope(float(np.abs(c).sum() / math.pi), 1.0, 0.0)
    else:
        env = Envelope(float(np.sum(np.abs(c) * 2 * r) / math.pi), 2.0,
                       1.0 / (2 * math.pi * r.min()))
    return TransformProfile(f, EvalFn(func, "none", env), env)


@dataclass(frozen=True)
class RearrangedTransform:
    """Approximate rearrangement of ``|f^|`` with certified tail information.

    Attributes
    ----------
    step : StepFn
        Rearrangement of the sampled ``|f^|`` on ``|xi| <= xi_max``.
    tail_level : float
        Bound for ``|f^|`` beyond ``xi_max``.
    tail_l2sq : float
        Bound for the squared L2 norm of ``f^`` beyond ``xi_max``.
    """

    n: int
    step: StepFn
    tail_level: float
    tail_l2sq: float
    xi_max: float
    n_samples: int
    envelope: Envelope

    def tail_rearrangement(self) -> EvalFn:
        """Rearrangement of the envelope restricted to ``|xi| > xi_max``."""
        C, d, n, X = self.envelope.C, self.envelope.d, self.n, self.xi_max
        nu = ball_volume(n)

        def func(s):
            return C * (X ** n + np.asarray(s, dtype=float) / nu) ** (-d / n)

        return EvalFn(func, "decreasing", Envelope(C * nu ** (d / n), d / n, 0.0),
                      Envelope(C * X ** -d, 0.0, math.inf))


def rearrange_transform(F: TransformProfile, xi_max: float | None = None,
                        n_samples: int = 2 ** 16, tail_tol: float | None = None
                        ) -> RearrangedTransform:
    """Sample ``|f^|`` on log cells near 0 and linear cells up to ``xi_max``, sort.

    Each sample is weighted by the measure of its spherical shell.
    """
    f = F.f
    n = f.n
    rmax = max(f.radii)
    if xi_max is None:
        xi_max = 1e3 * len(f.radii) / rmax
    env = F.envelope
    if xi_max <= env.T0:
        raise ValueError(f"window too small for the envelope; use xi_max > {env.T0:g}")
    level = env.C * xi_max ** -env.d
    if tail_tol is not None and level > tail_tol:
        raise ValueError("envelope too weak for the requested accuracy; suggested xi_max = "
                         f"{(env.C / tail_tol) ** (1 / env.d):.6g}")
    nu = ball_volume(n)
    n_log = max(n_samples // 16, 2)
    knee = min(0.5 / rmax, xi_max / 2)
    edges = np.concatenate([[0.0], np.geomspace(1e-6 * knee, knee, n_log),
                            np.linspace(knee, xi_max, n_samples - n_log + 1)[1:]])
    mid = 0.5 * (edges[:-1] + edges[1:])
    vals = np.abs(F(mid))
    meas = nu * (edges[1:] ** n - edges[:-1] ** n)
    order = np.argsort(-vals, kind="stable")
    cum = np.cumsum(meas[order])
    step = StepFn(cum, np.append(vals[order], 0.0))
    l2sq = n * nu * env.C ** 2 / xi_max
    return RearrangedTransform(n, step, float(level), float(l2sq), float(xi_max),
                               int(edges.size - 1), env)


def _u_square_integral(fstar: StepFn, t):
    """``int_0^t (int_0^{1/s} f*)^2 ds`` exactly, as ``int_{1/t}^inf F(y)^2 / y^2 dy``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    b = fstar.breakpoints
    v = fstar.values
    F = fstar.primitive(b)
    lo = np.concatenate([[0.0], b])
    hi = np.concatenate([b, [math.inf]])
    A = np.concatenate([[0.0], F - v[1:] * b])
    out = np.zeros_like(t)
    y0 = 1.0 / t
    for k in range(lo.size):
        a = np.maximum(lo[k], y0)
        m = a < hi[k]
        if not np.any(m):
            continue
        Ak, vk = A[k], v[k]

        def G(y):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(np.isinf(y), 0.0, -Ak ** 2 / y) + (
                    2 * Ak * vk * np.log(y) if vk * Ak != 0 else 0.0) + (
                    vk ** 2 * y if vk != 0 else 0.0)

        out[m] += G(np.full(m.sum(), hi[k])) - G(a[m])
    return out


@dataclass
class FourierReport:
    """Empirical constant of an inequality with uncertainty information."""

    criterion: str
    n: int
    constant: float
    constant_upper: float
    witness: float | None
    values: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def verified(self, C: float) -> bool:
        """``LHS - band <= C * RHS`` on the whole grid."""
        lhs = np.asarray(self.values["lhs"])
        rhs = np.asarray(self.values["rhs"])
        band = np.asarray(self.values.get("band", np.zeros_like(lhs)))
        return bool(np.all(lhs - band <= C * rhs))

    def to_dict(self):
        def conv(x):
            if isinstance(x, np.ndarray):
                return [conv(float(y)) for y in x]
            if isinstance(x, (list, tuple)):
                return [conv(y) for y in x]
            if isinstance(x, (float, np.floating)):
                x = float(x)
                return x if math.isfinite(x) else ("inf" if x > 0 else "nan")
            return x

        return {"criterion": self.criterion, "n": self.n, "constant": conv(self.constant),
                "constant_upper": conv(self.constant_upper), "witness": conv(self.witness),
                "values": {k: conv(v) for k, v in self.values.items()}, "notes": self.notes}


def _default_grid(f: RadialStep):
    scale = ball_volume(f.n) / max(f.radii) ** f.n
    return np.geomspace(1e-3, 1e3, 61) * scale


def verify_jt(f: RadialStep, t_grid=None, xi_max: float | None = None,
              n_samples: int = 2 ** 16) -> FourierReport:
    """``int_0^t (f^)*^2 <= C int_0^t (U f*)^2`` on a grid of ``t``.

    The left side comes from the sampled rearrangement; the part of ``f^``
    beyond the window adds at most ``min(t tail_level^2, tail_l2sq)``.
    """
    t = _default_grid(f) if t_grid is None else np.asarray(t_grid, dtype=float)
    R = rearrange_transform(transform(f), xi_max, n_samples)
    lhs = (R.step ** 2).primitive(t)
    band = np.minimum(t * R.tail_level ** 2, R.tail_l2sq)
    rhs = _u_square_integral(radial_rearrange(f), t)
    ratio = lhs / rhs
    i = int(np.argmax(ratio))
    return FourierReport("l2_rearranged_transform_vs_reciprocal_primitive", f.n,
                         float(ratio[i]), float(np.max((lhs + band) / rhs)), float(t[i]),
                         {"t": t, "lhs": lhs, "rhs": rhs, "band": band, "ratio": ratio})


def verify_reverse(f: RadialStep, t_grid=None, xi_max: float | None = None,
                   n_samples: int = 2 ** 16) -> FourierReport:
    """``int_0^{1/t} f* <= C' t^{-1} int_0^t (f^)*`` on a grid of ``t``.

    The sampled right side can miss at most ``tail_level`` from the part of
    ``f^`` beyond the window, so ``constant`` (using the sampled right side)
    is the conservative estimate and ``constant_lower`` the optimistic one.
    """
    t = _default_grid(f) if t_grid is None else np.asarray(t_grid, dtype=float)
    R = rearrange_transform(transform(f), xi_max, n_samples)
    lhs = radial_rearrange(f).primitive(1.0 / t)
    rhs = R.step.primitive(t) / t
    band = np.full_like(t, R.tail_level)
    ratio = lhs / rhs
    i = int(np.argmax(ratio))
    rep = FourierReport("reverse_reciprocal_primitive_bound", f.n, float(ratio[i]),
                        float(ratio[i]), float(t[i]),
                        {"t": t, "lhs": lhs, "rhs": rhs, "band": band, "ratio": ratio})
    rep.values["constant_lower"] = float(np.max(lhs / (rhs + band)))
    return rep


def reverse_constant(n: int) -> float:
    """Explicit constant of the reverse inequality.

    ``(8/pi)^n (C_n / nu_n) max(1, 2^{-n} nu_n^2)`` with ``C_n`` the reciprocal
    of the minimum of the squared Bessel kernel on ``[0, pi/2]``.
    """
    _check_dim(n)
    res = optimize.minimize_scalar(lambda s: bessel_kernel(n, s) ** 2, bounds=(0, math.pi / 2),
                                   method="bounded", options={"xatol": 1e-12})
    m = min(res.fun, bessel_kernel(n, math.pi / 2) ** 2)
    nu = ball_volume(n)
    return (8 / math.pi) ** n * (1 / m) / nu * max(1.0, 2.0 ** -n * nu ** 2)


def verify_norm_pair(rho: NormSpec, sigma: NormSpec, family, xi_max: float | None = None,
                     n_samples: int = 2 ** 16) -> FourierReport:
    """Empirical constant of ``rho(|f^|) <= C sigma(f)`` over a family."""
    ratios, uppers, notes, idx = [], [], [], []
    for k, f in enumerate(family):
        s = norm(sigma, radial_rearrange(f))
        if not (0 < s < math.inf):
            notes.append(f"sample {k} skipped: sigma = {s}")
            continue
        R = rearrange_transform(transform(f), xi_max, n_samples)
        r = norm(rho, R.step)
        band = norm(rho, R.tail_rearrangement())
        ratios.append(r / s)
        uppers.append((r + band) / s)
        idx.append(k)
    if not ratios:
        return FourierReport("norm_pair", family[0].n if family else 0, math.nan, math.nan,
                             None, {}, notes)
    ratios = np.array(ratios)
    run = np.maximum.accumulate(ratios)
    drift = float((run[-1] - run[-11]) / run[-1]) if run.size > 10 else math.nan
    i = int(np.argmax(ratios))
    return FourierReport("norm_pair", family[0].n, float(ratios[i]), float(np.max(uppers)),
                         float(idx[i]), {"sample": np.array(idx, dtype=float), "ratio": ratios,
                                         "ratio_upper": np.array(uppers), "running_max": run,
                                         "drift_last_10": drift}, notes)


def random_family(n: int, size: int, seed: int, max_terms: int = 4):
    """Seeded family of radially nonincreasing step functions."""
    rng = np.random.default_rng(seed)
    fam = []
    for _ in range(size):
        m = int(rng.integers(1, max_terms + 1))
        radii = np.sort(rng.uniform(0.25, 2.0, m))
        while np.any(np.diff(radii) <= 1e-3):
            radii = np.sort(rng.uniform(0.25, 2.0, m))
        coeffs = rng.uniform(0.1, 1.0, m)
        fam.append(RadialStep(n, tuple(radii.tolist()), tuple(coeffs.tolist())))
    return fam
