"""N-functions: Young functions given in closed form or sampled on a log grid."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["NFunction", "PowerN", "SampledN", "ComposedN", "power", "power_scaled",
           "complementary", "b1_from_a1", "ratio_monotone", "LOG_GRID"]

LOG_GRID = np.geomspace(1e-12, 1e12, 512)


class NFunction:
    """Convex increasing ``Phi`` with ``Phi(0) = 0``, onto the half-line."""

    def __call__(self, x):
        raise NotImplementedError

    def inverse(self, y):
        raise NotImplementedError

    def fundamental(self, t):
        """Luxemburg norm of the indicator of a set of measure ``t``."""
        t = np.asarray(t, dtype=float)
        return 1.0 / self.inverse(1.0 / t)


@dataclass(frozen=True)
class PowerN(NFunction):
    """``Phi(x) = scale * x^p``."""

    p: float
    scale: float = 1.0

    def __post_init__(self):
        if self.p < 1 or self.scale <= 0:
            raise ValueError("need p >= 1 and a positive scale")

    def __call__(self, x):
        return self.scale * np.asarray(x, dtype=float) ** self.p

    def inverse(self, y):
        return (np.asarray(y, dtype=float) / self.scale) ** (1.0 / self.p)

    def to_dict(self):
        return {"kind": "power", "p": self.p, "scale": self.scale}


def power(p: float) -> PowerN:
    return PowerN(float(p))


def power_scaled(p: float) -> PowerN:
    return PowerN(float(p), 1.0 / float(p))


class SampledN(NFunction):
    """N-function known on a grid, interpolated linearly in log-log coordinates.

    Beyond the grid the end slopes are continued, i.e. ``Phi`` is extended
    as a power function on both sides.
    """

    def __init__(self, x, phi):
        x = np.asarray(x, dtype=float)
        phi = np.asarray(phi, dtype=float)
        if x.ndim != 1 or x.size < 2 or x.shape != phi.shape:
            raise ValueError("need matching 1-D grids")
        if np.any(np.diff(x) <= 0) or np.any(np.diff(phi) <= 0) or x[0] <= 0 or phi[0] <= 0:
            raise ValueError("not invertible: grid values must be positive and increasing")
        self.x, self.phi = x, phi
        self._lx, self._lp = np.log(x), np.log(phi)

    @classmethod
    def from_derivative(cls, x, rate):
        """``Phi = int_0^x phi`` from samples of the nondecreasing rate ``phi``.

        Each grid cell is integrated exactly for the log-log interpolant of
        ``phi``; below the first node ``phi`` is continued as a power.
        """
        x = np.asarray(x, dtype=float)
        r = np.asarray(rate, dtype=float)
        if np.any(np.diff(r) < 0) or r[0] <= 0:
            raise ValueError("rate must be positive and nondecreasing")
        lx, lr = np.log(x), np.log(r)
        s = np.diff(lr) / np.diff(lx)
        k = s + 1
        with np.errstate(divide="ignore", invalid="ignore"):
            cell = np.where(np.abs(k) < 1e-12, r[:-1] * x[:-1] * np.diff(lx),
                            r[:-1] * x[:-1] * np.expm1(k * np.diff(lx)) / k)
        head = r[0] * x[0] / (s[0] + 1)
        return cls(x, head + np.concatenate([[0.0], np.cumsum(cell)]))

    def _interp(self, lx_from, ly_from, v):
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore"):
            lv = np.log(v)
        out = np.interp(lv, lx_from, ly_from)
        lo_s = (ly_from[1] - ly_from[0]) / (lx_from[1] - lx_from[0])
        hi_s = (ly_from[-1] - ly_from[-2]) / (lx_from[-1] - lx_from[-2])
        out = np.where(lv < lx_from[0], ly_from[0] + lo_s * (lv - lx_from[0]), out)
        out = np.where(lv > lx_from[-1], ly_from[-1] + hi_s * (lv - lx_from[-1]), out)
        res = np.where(v > 0, np.exp(out), 0.0)
        return float(res) if res.ndim == 0 else res

    def __call__(self, x):
        return self._interp(self._lx, self._lp, x)

    def inverse(self, y):
        return self._interp(self._lp, self._lx, y)

    def to_dict(self):
        return {"kind": "sampled", "x": self.x.tolist(), "phi": self.phi.tolist()}


@dataclass(frozen=True)
class ComposedN(NFunction):
    """``x -> base(x^k)``, e.g. the N-function behind the convexified Orlicz norm."""

    base: NFunction
    k: float

    def __call__(self, x):
        return self.base(np.asarray(x, dtype=float) ** self.k)

    def inverse(self, y):
        return self.base.inverse(y) ** (1.0 / self.k)


def complementary(A: NFunction, grid=LOG_GRID) -> SampledN:
    """Complementary function, defined through its inverse ``t / A^{-1}(t)``."""
    t = np.asarray(grid, dtype=float)
    y = t / A.inverse(t)
    if np.any(np.diff(y) <= 0):
        raise ValueError("not invertible: t / A^{-1}(t) is not increasing")
    return SampledN(y, t)


def b1_from_a1(A1: NFunction, grid=LOG_GRID) -> SampledN:
    """``B(t) = 1 / Atilde(1/t)`` with ``Atilde`` the complementary function of ``A1``."""
    At = complementary(A1, grid)
    return SampledN(1.0 / At.x[::-1], 1.0 / At.phi[::-1])


def ratio_monotone(fun, power_: float, direction: str, grid=None, rtol: float = 1e-9) -> bool:
    """Whether ``fun(t) / t^power_`` is monotone in the given direction on a log grid.

    ``direction`` is ``"nonincreasing"`` or ``"nondecreasing"``.
    """
    grid = np.geomspace(1e-8, 1e8, 321) if grid is None else np.asarray(grid, dtype=float)
    r = np.asarray(fun(grid), dtype=float) / grid ** power_
    d = np.diff(r)
    slack = rtol * np.maximum(np.abs(r[:-1]), np.abs(r[1:]))
    if direction == "nonincreasing":
        return bool(np.all(d <= slack))
    if direction == "nondecreasing":
        return bool(np.all(d >= -slack))
    raise ValueError("direction must be 'nonincreasing' or 'nondecreasing'")


def luxemburg_gauge(phi: NFunction, values, lengths, rtol: float = 1e-13) -> float:
    """Luxemburg gauge of the step function taking ``values`` on sets of ``lengths``."""
    v = np.asarray(values, dtype=float)
    m = np.asarray(lengths, dtype=float)
    keep = v > 0
    v, m = v[keep], m[keep]
    if v.size == 0:
        return 0.0
    if np.any(~np.isfinite(m)):
        return math.inf

    def modular(lam):
        return float(np.sum(phi(v / lam) * m))

    lo = hi = float(v.max())
    for _ in range(2000):
        if modular(hi) <= 1:
            break
        hi *= 2
    else:
        raise ValueError("modular never <= 1")
    for _ in range(2000):
        if modular(lo) > 1:
            break
        lo /= 2
    else:
        return 0.0
    while hi / lo - 1 > rtol:
        mid = math.sqrt(lo * hi)
        if modular(mid) > 1:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)
