"""Exact calculus for nonnegative compactly supported step functions.

A step function is stored as strictly increasing breakpoints t_0 < ... < t_n
and values v_1 ... v_n, v_i being the value on the open piece (t_{i-1}, t_i).
The function is 0 outside (t_0, t_n). Functions are identified up to measure
zero: all intervals are open and boundary values are never queried.

Everything here is a finite sum, max, or piecewise-linear inversion, so all
results are exact up to float rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "StepFunction",
    "Interval",
    "HalvingChain",
    "integrate",
    "dual_weight",
    "lorentz_norms",
    "weak_l1inf_on",
    "lp_norm",
    "halving_chain",
]


@dataclass(frozen=True)
class Interval:
    """Open interval (left, right) with left < right."""

    left: float
    right: float

    def __post_init__(self) -> None:
        if not (self.left < self.right):
            raise ValueError(f"empty interval ({self.left}, {self.right})")
        if not (math.isfinite(self.left) and math.isfinite(self.right)):
            raise ValueError("interval endpoints must be finite")

    @property
    def length(self) -> float:
        return self.right - self.left


class StepFunction:
    """Nonnegative piecewise-constant function with compact support.

    Parameters
    ----------
    breakpoints : sequence of floats, strictly increasing, length n+1
    values : sequence of nonnegative floats, length n, value on each piece

    The arrays are copied and frozen; instances are immutable and safe to
    share across threads.
    """

    __slots__ = ("breakpoints", "values", "_cum")

    def __init__(self, breakpoints: Sequence[float], values: Sequence[float]) -> None:
        t = np.asarray(breakpoints, dtype=np.float64).copy()
        v = np.asarray(values, dtype=np.float64).copy()
        if t.ndim != 1 or v.ndim != 1 or t.size != v.size + 1 or v.size < 1:
            raise ValueError("need n+1 breakpoints and n >= 1 values")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(v)):
            raise ValueError("breakpoints and values must be finite")
        if np.any(np.diff(t) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(v < 0):
            raise ValueError("values must be nonnegative")
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "breakpoints", t)
        object.__setattr__(self, "values", v)
        # cumulative F with F(t_0) = 0; piecewise linear, exact for steps
        cum = np.concatenate(([0.0], np.cumsum(v * np.diff(t))))
        cum.flags.writeable = False
        object.__setattr__(self, "_cum", cum)

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("StepFunction is immutable")

    def __repr__(self) -> str:
        return f"StepFunction({self.breakpoints.tolist()}, {self.values.tolist()})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StepFunction)
            and self.breakpoints.shape == other.breakpoints.shape
            and bool(np.all(self.breakpoints == other.breakpoints))
            and bool(np.all(self.values == other.values))
        )

    def __hash__(self) -> int:
        return hash((self.breakpoints.tobytes(), self.values.tobytes()))

    # -- basic queries ----------------------------------------------------

    @property
    def support(self) -> Interval:
        return Interval(float(self.breakpoints[0]), float(self.breakpoints[-1]))

    def value_at(self, x: float) -> float:
        """Value on the piece containing x; 0 outside the support.

        x exactly at a breakpoint returns the value just right of it (the
        function is defined up to measure zero, so any convention works; this
        one keeps cumulative differences consistent).
        """
        t = self.breakpoints
        if x < t[0] or x >= t[-1]:
            return 0.0
        i = int(np.searchsorted(t, x, side="right")) - 1
        return float(self.values[i])

    def cumulative(self, x: float) -> float:
        """F(x) = integral of f over (t_0, x), piecewise linear, exact."""
        t = self.breakpoints
        if x <= t[0]:
            return 0.0
        if x >= t[-1]:
            return float(self._cum[-1])
        i = int(np.searchsorted(t, x, side="right")) - 1
        return float(self._cum[i] + self.values[i] * (x - t[i]))

    def cumulative_many(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized cumulative; exact piecewise-linear interpolation."""
        t = self.breakpoints
        xs = np.asarray(xs, dtype=np.float64)
        xc = np.clip(xs, t[0], t[-1])
        idx = np.clip(np.searchsorted(t, xc, side="right") - 1, 0, len(self.values) - 1)
        return self._cum[idx] + self.values[idx] * (xc - t[idx])

    @property
    def total_mass(self) -> float:
        return float(self._cum[-1])

    # -- algebra ----------------------------------------------------------

    def power(self, e: float) -> "StepFunction":
        """Pointwise power on the support. Requires values > 0 when e < 0."""
        if e < 0 and np.any(self.values == 0.0):
            raise ValueError("weight vanishes; negative power undefined in numeric mode")
        return StepFunction(self.breakpoints, self.values**e)

    def scale(self, c: float) -> "StepFunction":
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        return StepFunction(self.breakpoints, self.values * c)

    def reflect(self) -> "StepFunction":
        """x -> f(-x); used to derive minus-side operators from plus-side."""
        return StepFunction(-self.breakpoints[::-1], self.values[::-1])

    def translate(self, dx: float) -> "StepFunction":
        return StepFunction(self.breakpoints + dx, self.values)

    def restrict(self, I: Interval) -> "StepFunction":
        """f * chi_I as a step function. I must meet the support."""
        lo = max(I.left, float(self.breakpoints[0]))
        hi = min(I.right, float(self.breakpoints[-1]))
        if not lo < hi:
            raise ValueError("restriction window misses the support")
        t = self.breakpoints
        inner = t[(t > lo) & (t < hi)]
        bp = np.concatenate(([lo], inner, [hi]))
        mids = (bp[:-1] + bp[1:]) / 2.0
        idx = np.clip(np.searchsorted(t, mids, side="right") - 1, 0, len(self.values) - 1)
        return StepFunction(bp, self.values[idx])

    def multiply(self, other: "StepFunction") -> "StepFunction":
        """Pointwise product on the intersection of supports."""
        lo = max(self.breakpoints[0], other.breakpoints[0])
        hi = min(self.breakpoints[-1], other.breakpoints[-1])
        if not lo < hi:
            raise ValueError("supports do not overlap")
        bp = np.unique(np.concatenate([
            self.breakpoints[(self.breakpoints >= lo) & (self.breakpoints <= hi)],
            other.breakpoints[(other.breakpoints >= lo) & (other.breakpoints <= hi)],
            [lo, hi],
        ]))
        mids = (bp[:-1] + bp[1:]) / 2.0
        va = np.array([self.value_at(m) for m in mids])
        vb = np.array([other.value_at(m) for m in mids])
        return StepFunction(bp, va * vb)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}
        )

    @staticmethod
    def from_json(text: str) -> "StepFunction":
        obj = json.loads(text)
        if not isinstance(obj, dict) or "breakpoints" not in obj or "values" not in obj:
            raise ValueError("expected object with 'breakpoints' and 'values'")
        vals = [abs(float(v)) for v in obj["values"]]  # operators take |f|
        return StepFunction([float(t) for t in obj["breakpoints"]], vals)


@dataclass(frozen=True)
class HalvingChain:
    """Points x_0 = a < x_1 < ... with sigma(x_i, b) = 2^{-i} sigma(a, b)."""

    base: Interval
    points: tuple
    masses: tuple


def refine_breakpoints(f: StepFunction, g: StepFunction) -> np.ndarray:
    """Common refinement of two step functions' breakpoints on the overlap."""
    lo = max(f.breakpoints[0], g.breakpoints[0])
    hi = min(f.breakpoints[-1], g.breakpoints[-1])
    if not lo < hi:
        raise ValueError("supports do not overlap")
    pts = np.unique(np.concatenate([
        f.breakpoints[(f.breakpoints >= lo) & (f.breakpoints <= hi)],
        g.breakpoints[(g.breakpoints >= lo) & (g.breakpoints <= hi)],
        [lo, hi],
    ]))
    return pts


def integrate(f: StepFunction, I: Interval) -> float:
    """Exact integral of f over I: sum of v_i * |piece_i  I|."""
    return f.cumulative(I.right) - f.cumulative(I.left)


def dual_weight(w: StepFunction, p: float) -> StepFunction:
    """sigma = w^{-1/(p-1)}, same breakpoints. Requires w > 0 and p > 1."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    if np.any(w.values == 0.0):
        raise ValueError("weight vanishes; σ undefined in numeric mode")
    return w.power(-1.0 / (p - 1.0))


def _distribution(f: StepFunction):
    """Distinct positive values v (descending) and measures m_v = |{f >= v}|."""
    lengths = np.diff(f.breakpoints)
    order = np.argsort(f.values)[::-1]
    vals = f.values[order]
    lens = lengths[order]
    cum = np.cumsum(lens)
    out_v, out_m = [], []
    for i in range(len(vals)):
        if vals[i] <= 0.0:
            break
        if i + 1 < len(vals) and vals[i + 1] == vals[i]:
            continue  # keep only the last index of a tie: full measure of {f >= v}
        out_v.append(float(vals[i]))
        out_m.append(float(cum[i]))
    return out_v, out_m


def lorentz_norms(f: StepFunction, p: float) -> tuple:
    """(weak L^{p,inf} norm, L^{p,1} norm), both exact for step functions.

    weak = max over distinct values v of v * |{f >= v}|^{1/p}; the sup over
    t of t |{f > t}|^{1/p} is attained from below at the jumps, where it
    equals this max. l_p1 = int_0^inf |{f > t}|^{1/p} dt, a finite sum since
    the distribution function is a step function of t.
    """
    if not p >= 1:
        raise ValueError("p must be at least 1")
    vals, meas = _distribution(f)
    if not vals:
        return 0.0, 0.0
    weak = max(v * m ** (1.0 / p) for v, m in zip(vals, meas))
    # distribution of t -> |{f > t}|: equals meas[i] for t in [vals[i+1], vals[i])
    lp1 = 0.0
    prev_v = 0.0
    for v, m in zip(reversed(vals), reversed(meas)):
        lp1 += (v - prev_v) * m ** (1.0 / p)
        prev_v = v
    return weak, lp1


def weak_l1inf_on(w: StepFunction, I: Interval) -> float:
    """||w chi_I||_{L^{1,inf}} = max over values v of v * |{w >= v} cap I|."""
    lo = max(I.left, float(w.breakpoints[0]))
    hi = min(I.right, float(w.breakpoints[-1]))
    if not lo < hi:
        return 0.0
    return _weak_on(w, lo, hi)


def _weak_on(w: StepFunction, lo: float, hi: float) -> float:
    t, v = w.breakpoints, w.values
    i0 = int(np.searchsorted(t, lo, side="right")) - 1
    i1 = int(np.searchsorted(t, hi, side="left"))
    best = 0.0
    seg_v, seg_len = [], []
    for i in range(max(i0, 0), min(i1, len(v))):
        a = max(float(t[i]), lo)
        b = min(float(t[i + 1]), hi)
        if b > a:
            seg_v.append(float(v[i]))
            seg_len.append(b - a)
    order = np.argsort(seg_v)[::-1]
    acc = 0.0
    k = 0
    while k < len(order):
        j = k
        while j + 1 < len(order) and seg_v[order[j + 1]] == seg_v[order[k]]:
            j += 1
        for m in range(k, j + 1):
            acc += seg_len[order[m]]
        val = seg_v[order[k]]
        if val > 0:
            best = max(best, val * acc)
        k = j + 1
    return best


def lp_norm(f: StepFunction, w: StepFunction, p: float) -> float:
    """||f||_{L^p(w)} over the common support, exact finite sum."""
    if not p >= 1:
        raise ValueError("p must be at least 1")
    pts = refine_breakpoints(f, w)
    mids = (pts[:-1] + pts[1:]) / 2.0
    fv = np.array([f.value_at(m) for m in mids])
    wv = np.array([w.value_at(m) for m in mids])
    return float(np.sum(fv**p * wv * np.diff(pts)) ** (1.0 / p))


def halving_chain(sigma: StepFunction, I: Interval, depth: int) -> HalvingChain:
    """x_0 = a < x_1 < ... < x_depth with sigma(x_i, b) = 2^{-i} sigma(a, b).

    Each x_i is found by inverting the piecewise-linear cumulative of sigma,
    exact within a piece. Raises when sigma has no mass on I.
    """
    a, b = I.left, I.right
    total = sigma.cumulative(b) - sigma.cumulative(a)
    if total <= 0.0:
        raise ValueError("no mass to halve")
    Fb = sigma.cumulative(b)
    points = [a]
    masses = [total]
    for i in range(1, depth + 1):
        target = Fb - total / (2.0**i)  # F(x_i) = F(b) - sigma(a,b)/2^i
        points.append(_invert_cumulative(sigma, target, points[-1], b))
        masses.append(Fb - sigma.cumulative(points[-1]))
    return HalvingChain(base=I, points=tuple(points), masses=tuple(masses))


def _invert_cumulative(f: StepFunction, target: float, lo: float, hi: float) -> float:
    """Smallest x in [lo, hi] with F(x) >= target; linear solve per piece."""
    t, v, cum = f.breakpoints, f.values, f._cum
    if f.cumulative(lo) >= target:
        return lo
    for i in range(len(v)):
        if t[i + 1] <= lo:
            continue
        if v[i] <= 0.0:
            continue
        Fl = f.cumulative(max(float(t[i]), lo))
        Fr = f.cumulative(min(float(t[i + 1]), hi))
        if Fr >= target:
            x0 = max(float(t[i]), lo)
            return min(x0 + (target - Fl) / v[i], hi)
        if t[i + 1] >= hi:
            break
    return hi
