"""One-sided maximal operators on step functions, exactly.

M+ f(x) = sup_{h>0} (1/h) int_x^{x+h} f. For a step function the sup over h
is attained with the window ending at a breakpoint of f (the average is
monotone in h across each constant piece), so pointwise evaluation is a max
over finitely many chord slopes of the cumulative F.

compile_envelope goes further: one right-to-left scan maintains the upper
concave hull of the points (t_j, F(t_j)) and emits an exact piecewise
representation of x -> M+ f(x) made of constant pieces and Moebius pieces
beta + c1/(pole - x). Key facts that make the scan correct:

- only upper-hull vertices can be optimal chord anchors;
- within one piece of f, comparing an anchor's chord against the piece's
  small-h value is x-free (a sign test on c1 = F_b - F(extrapolated b));
- two anchor chords cross at most once (their difference clears to an affine
  function of x), and as x decreases the winning anchor moves right, so the
  winner sequence is a single monotone walk.

M- is obtained from M+ by reflection, never re-derived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _backend, _fallback
from .stepfn import Interval, StepFunction, refine_breakpoints

__all__ = [
    "Envelope",
    "FractionalParams",
    "QuadratureError",
    "compile_envelope",
    "mplus_at",
    "malpha_at",
    "integrate_power_weight",
    "integrate_mminus_exact",
]

_INF = math.inf


@dataclass(frozen=True)
class FractionalParams:
    """alpha in [0,1) with exponents tied by 1/q = 1/p - alpha."""

    alpha: float
    p: float
    q: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError("alpha must lie in [0, 1)")
        if not (self.p > 1.0 and self.q > 0.0):
            raise ValueError("need p > 1 and q > 0")
        if abs(1.0 / self.q - (1.0 / self.p - self.alpha)) > 1e-12:
            raise ValueError("q inconsistent with p and alpha")


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature exhausts its budget.

    Carries the best estimate and the achieved absolute error bound.
    """

    def __init__(self, message: str, best: float, achieved: float) -> None:
        super().__init__(message)
        self.best = best
        self.achieved = achieved


class Envelope:
    """Exact piecewise form of M+ f or M- f.

    Pieces partition the line. Piece k lives on (lo[k], hi[k]) and evaluates
    to beta[k] when c1[k] == 0, else to beta[k] + c1[k]/(pole[k] - x) on the
    plus side and beta[k] + c1[k]/(x - pole[k]) on the minus side. On the
    plus side every piece is nondecreasing, on the minus side nonincreasing.
    """

    __slots__ = ("lo", "hi", "beta", "c1", "pole", "side", "source", "hull_ops")

    def __init__(self, lo, hi, beta, c1, pole, side: str, source: StepFunction, hull_ops: int):
        self.lo = np.asarray(lo, dtype=np.float64)
        self.hi = np.asarray(hi, dtype=np.float64)
        self.beta = np.asarray(beta, dtype=np.float64)
        self.c1 = np.asarray(c1, dtype=np.float64)
        self.pole = np.asarray(pole, dtype=np.float64)
        self.side = side
        self.source = source
        self.hull_ops = hull_ops

    def __len__(self) -> int:
        return len(self.lo)

    def value(self, x: float) -> float:
        return float(self.values(np.array([x]))[0])

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        k = np.clip(np.searchsorted(self.hi, xs, side="right"), 0, len(self.lo) - 1)
        base = self.beta[k]
        den = (self.pole[k] - xs) if self.side == "plus" else (xs - self.pole[k])
        with np.errstate(divide="ignore", invalid="ignore"):
            mob = base + self.c1[k] / den
        return np.where(self.c1[k] == 0.0, base, mob)

    def superlevel(self, lam: float, closed: bool = False) -> list:
        """{x : env(x) > lam} as a merged list of (a, b), lam > 0.

        With closed=True the set is {env >= lam}; only constant pieces can
        differ (Moebius pieces attain each level on a single point, so the
        two versions agree up to measure zero there).
        """
        if not lam > 0.0:
            raise ValueError("level must be positive")
        out = []
        for k in range(len(self.lo)):
            lo, hi, b, c, pole = self.lo[k], self.hi[k], self.beta[k], self.c1[k], self.pole[k]
            if c == 0.0:
                if b > lam or (closed and b == lam):
                    out.append((lo, hi))
                continue
            if lam <= b:
                out.append((lo, hi))
                continue
            if self.side == "plus":  # increasing piece
                x_lam = pole - c / (lam - b)
                if x_lam < hi:
                    out.append((max(lo, x_lam), hi))
            else:  # decreasing piece
                x_lam = pole + c / (lam - b)
                if x_lam > lo:
                    out.append((lo, min(hi, x_lam)))
        return _merge_intervals(out)

    def integrate(self, I: Interval) -> float:
        """Exact unweighted integral of the envelope over I."""
        total = 0.0
        for k in range(len(self.lo)):
            a = max(self.lo[k], I.left)
            b = min(self.hi[k], I.right)
            if not a < b:
                continue
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValueError("cannot integrate an unbounded window")
            c = self.c1[k]
            total += self.beta[k] * (b - a)
            if c != 0.0:
                p = self.pole[k]
                if self.side == "plus":
                    total += c * math.log((p - a) / (p - b))
                else:
                    total += c * math.log((b - p) / (a - p))
        return total

    def to_jsonable(self) -> list:
        out = []
        for k in range(len(self.lo)):
            kind = "constant" if self.c1[k] == 0.0 else "moebius"
            out.append({
                "interval": [float(self.lo[k]), float(self.hi[k])],
                "kind": kind,
                "coefficients": [float(self.beta[k]), float(self.c1[k])],
                "anchor": float(self.pole[k]) if kind == "moebius" else None,
            })
        return out


def _merge_intervals(ivs: list) -> list:
    ivs = sorted((a, b) for a, b in ivs if b > a)
    out = []
    for a, b in ivs:
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return [(a, b) for a, b in out]


def compile_envelope(f: StepFunction, side: str = "plus") -> Envelope:
    """Exact piecewise envelope of M+ f (side='plus') or M- f ('minus')."""
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    g = f if side == "plus" else f.reflect()
    lo, hi, beta, c1, pole, ops = _backend.compile_plus(g.breakpoints, g._cum, g.values)
    if side == "minus":
        # reflect pieces back: (lo,hi) -> (-hi,-lo), pole -> -pole
        lo, hi = -hi[::-1], -lo[::-1]
        beta, c1 = beta[::-1].copy(), c1[::-1].copy()
        pole = -pole[::-1]
    keep = np.ones(len(lo), dtype=bool)
    for k in range(1, len(lo)):
        j = k - 1
        while not keep[j]:
            j -= 1
        same = beta[j] == beta[k] and c1[j] == c1[k] and (c1[k] == 0.0 or pole[j] == pole[k])
        if same and hi[j] == lo[k]:
            hi[j] = hi[k]
            keep[k] = False
    lo, hi, beta, c1, pole = (np.ascontiguousarray(col[keep]) for col in (lo, hi, beta, c1, pole))
    return Envelope(lo, hi, beta, c1, pole, side, f, ops)


def mplus_at(f: StepFunction, x: float, side: str = "plus") -> float:
    """Pointwise M+ f(x) (or M- via reflection): max over chord slopes.

    Returns 0 when the one-sided window never meets the support.
    """
    if side == "minus":
        return mplus_at(f.reflect(), -x, "plus")
    t = f.breakpoints
    if x >= t[-1]:
        return 0.0
    # i = first breakpoint strictly right of x
    i = int(np.searchsorted(t, x, side="right"))
    best = 0.0
    if i > 0:
        # windows inside the piece holding x average to exactly its value;
        # this replaces the chord to t[i], whose float form divides rounded
        # cumulatives by a possibly tiny width
        best = float(f.values[i - 1])
    Fx = f.cumulative(x)
    for j in range(i + 1 if i > 0 else 1, len(t)):
        best = max(best, (f._cum[j] - Fx) / (t[j] - x))
    return float(best)


def malpha_at(f: StepFunction, fp: FractionalParams, x: float, side: str = "plus") -> float:
    """Fractional M_alpha^+ f(x) = sup_h h^{alpha-1} int_x^{x+h} f, exact.

    Candidates: windows ending at breakpoints of f past x, plus the interior
    stationary point of g(h) = (C + v(h - h_j)) h^{alpha-1} on each piece,
    h* = (1 - alpha)(C - v h_j)/(v alpha), when it falls inside the piece.
    """
    if side == "minus":
        return malpha_at(f.reflect(), fp, -x, "plus")
    a = fp.alpha
    if a == 0.0:
        return mplus_at(f, x, "plus")
    t = f.breakpoints
    if x >= t[-1]:
        return 0.0
    Fx = f.cumulative(x)
    best = 0.0
    js = np.nonzero(t > x)[0]
    for j in js:
        h = t[j] - x
        best = max(best, (f._cum[j] - Fx) * h ** (a - 1.0))
    # interior stationary points, one candidate per piece to the right of x
    for j in js:
        if j == 0:
            continue
        vj = f.values[j - 1]
        if vj <= 0.0:
            continue
        h_lo = max(t[j - 1] - x, 0.0)
        h_hi = t[j] - x
        C = f.cumulative(max(t[j - 1], x)) - Fx  # mass accumulated entering the piece
        # g(h) = (C + v (h - h_lo)) h^{a-1} is stationary at h*
        hs = (1.0 - a) * (C - vj * h_lo) / (vj * a)
        if h_lo < hs < h_hi:
            best = max(best, (C + vj * (hs - h_lo)) * hs ** (a - 1.0))
    return float(best)


def integrate_power_weight(env: Envelope, p: float, w: StepFunction, tol: float = 1e-8) -> float:
    """Integral of (envelope)^p * w with adaptive Gauss-Legendre panels.

    Cells are the common refinement of envelope pieces and w pieces inside
    w's support; each cell is smooth (const^p * const or Moebius^p * const).
    Constant cells are summed in closed form. The Moebius cells are halved
    adaptively until the local error estimate fits a per-cell share of the
    requested relative tolerance. Raises QuadratureError carrying the best
    estimate when the budget runs out.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    cuts = set(w.breakpoints.tolist())
    wl, wr = float(w.breakpoints[0]), float(w.breakpoints[-1])
    for k in range(len(env.lo)):
        for e in (env.lo[k], env.hi[k]):
            if wl < e < wr:
                cuts.add(float(e))
    xs = sorted(cuts)
    cells = []
    for a, b in zip(xs[:-1], xs[1:]):
        wv = w.value_at(0.5 * (a + b))
        if wv == 0.0:
            continue
        k = int(np.clip(np.searchsorted(env.hi, 0.5 * (a + b), side="right"), 0, len(env.lo) - 1))
        cells.append((a, b, wv, k))
    total_closed = 0.0
    open_cells = []
    for a, b, wv, k in cells:
        if env.c1[k] == 0.0:
            total_closed += wv * env.beta[k] ** p * (b - a)
        else:
            open_cells.append((a, b, wv, k))
    if not open_cells:
        return total_closed

    ca = np.array([c[0] for c in open_cells])
    cb = np.array([c[1] for c in open_cells])
    cw = np.array([c[2] for c in open_cells])
    ks = np.array([c[3] for c in open_cells], dtype=np.intp)
    cbeta = np.ascontiguousarray(env.beta[ks])
    cc1 = np.ascontiguousarray(env.c1[ks])
    cpole = np.ascontiguousarray(env.pole[ks])
    plus = env.side == "plus"

    # one coarse vectorized pass fixes the per-cell error budget; the coarse
    # pass is always the NumPy path so both kernel lanes share one budget
    coarse = total_closed + float(np.dot(cw, _fallback._gl8_batch(ca, cb, cbeta, cc1, cpole, p, plus)))
    tol_cell = tol * max(abs(coarse), 1e-300) / len(open_cells)
    tol_abs = tol_cell / np.maximum(cw, 1e-300)

    vals, errs = _backend.integrate_power_cells(ca, cb, cbeta, cc1, cpole, p, plus, tol_abs)
    total = total_closed + float(np.dot(cw, vals))
    achieved = float(np.dot(cw, errs))
    if achieved > tol * max(abs(total), 1e-300) * 4.0:
        raise QuadratureError("quadrature budget exhausted", total, achieved)
    return total


def integrate_mminus_exact(w: StepFunction, I: Interval) -> float:
    """int_I M-(w chi_I), closed form via the minus-side envelope.

    Constant pieces integrate trivially; Moebius pieces through the exact
    antiderivative beta x + c1 log(x - pole).
    """
    g = w.restrict(I)
    env = compile_envelope(g, "minus")
    return env.integrate(I)


def integrate_mplus_exact(w: StepFunction, I: Interval) -> float:
    """int_I M+(w chi_I), closed form; the minus-side A_inf mirror."""
    g = w.restrict(I)
    env = compile_envelope(g, "plus")
    return env.integrate(I)
