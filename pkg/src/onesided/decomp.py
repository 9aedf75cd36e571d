"""Level-set anatomy of the one-sided maximal function.

For a step function f and a ratio lam > 1 the open sets

  O_k = {x : M+f(x) > lam^k}

are nested, and each is a finite union of bounded disjoint component
intervals I_{j,k} computed exactly from the compiled envelope. Carving the
next level out of each component gives

  E_{j,k} = I_{j,k} cap {M+f <= lam^{k+1}},    F_k = {M+f <= lam^{k+2}},

and on every component a geometric mass-halving chain for an auxiliary
measure sigma: x_0 = a and sigma(x_{i+1}, b) = sigma(x_i, b) / 2. The
transcript records all of it so the two covering lemmas shipped here
(`verify_key_lemma`, `verify_rwtype`) and the test suite can replay the
construction exactly.

All set algebra runs on sorted disjoint interval lists, so measures of
intersections, unions, and complements are exact up to float rounding of
the endpoints themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .claims import ClaimResult
from .maximal import Envelope, compile_envelope
from .stepfn import HalvingChain, Interval, StepFunction
from .weights import restricted_minus

__all__ = [
    "LevelComponents",
    "DecompTranscript",
    "level_components",
    "build_transcript",
    "verify_key_lemma",
    "verify_rwtype",
    "intersect_lists",
    "subtract_lists",
    "complement_list",
    "total_length",
]

IntervalList = List[Tuple[float, float]]


# ---------------------------------------------------------------------------
# exact interval-list algebra (inputs sorted and disjoint)


def total_length(xs: Sequence[Tuple[float, float]]) -> float:
    return float(sum(b - a for a, b in xs))


def intersect_lists(xs, ys) -> IntervalList:
    out = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        a = max(xs[i][0], ys[j][0])
        b = min(xs[i][1], ys[j][1])
        if a < b:
            out.append((a, b))
        if xs[i][1] <= ys[j][1]:
            i += 1
        else:
            j += 1
    return out


def complement_list(xs) -> IntervalList:
    out = []
    cur = -math.inf
    for a, b in xs:
        if cur < a:
            out.append((cur, a))
        cur = max(cur, b)
    if cur < math.inf:
        out.append((cur, math.inf))
    return out


def subtract_lists(xs, ys) -> IntervalList:
    return intersect_lists(xs, complement_list(ys))


def _mass_on(w: StepFunction, xs) -> float:
    cum = w.cumulative
    return float(sum(cum(b) - cum(a) for a, b in xs))


# ---------------------------------------------------------------------------
# transcript types


@dataclass(frozen=True)
class LevelComponents:
    """Component intervals of one superlevel set {M+f > threshold}."""

    k: int
    lam: float
    threshold: float
    intervals: Tuple[Tuple[float, float], ...]

    def to_jsonable(self):
        return {
            "k": self.k,
            "lambda": self.lam,
            "threshold": self.threshold,
            "intervals": [[a, b] for a, b in self.intervals],
        }


@dataclass(frozen=True)
class DecompTranscript:
    """Full level-set record over a finite band of scales.

    levels[i] holds the components at k = krange[0] + i. e_sets, f_sets and
    chains run parallel to levels: e_sets[i][j] is the interval list of the
    carved set inside component j, f_sets[i] the (unbounded) interval list
    of {M+f <= lam^{k+2}}, chains[i][j] the halving chain of component j
    together with the entry points tilde_x[i][j] (first point of the carved
    set at or after each x_i; None when the gap holds none of it).
    """

    lam: float
    krange: Tuple[int, int]
    levels: Tuple[LevelComponents, ...]
    e_sets: Tuple[Tuple[Tuple[Tuple[float, float], ...], ...], ...]
    f_sets: Tuple[Tuple[Tuple[float, float], ...], ...]
    chains: Tuple[Tuple[HalvingChain, ...], ...]
    tilde_x: Tuple[Tuple[Tuple[Optional[float], ...], ...], ...]

    def to_jsonable(self):
        def _nums(x):
            return None if x is None else float(x)

        return {
            "lambda": self.lam,
            "krange": list(self.krange),
            "levels": [lv.to_jsonable() for lv in self.levels],
            "carved": [
                [[[a, b] for a, b in comp] for comp in lvl] for lvl in self.e_sets
            ],
            "tail_sets": [[[a, b] for a, b in lvl] for lvl in self.f_sets],
            "chains": [
                [
                    {
                        "base": [ch.base.left, ch.base.right],
                        "points": list(ch.points),
                        "masses": list(ch.masses),
                        "entries": [_nums(t) for t in tl],
                    }
                    for ch, tl in zip(lvl_ch, lvl_tl)
                ]
                for lvl_ch, lvl_tl in zip(self.chains, self.tilde_x)
            ],
        }


# ---------------------------------------------------------------------------
# construction


def level_components(
    f: StepFunction, lam: float, k: int, env: Optional[Envelope] = None
) -> LevelComponents:
    """Components of {M+f > lam^k}, exactly from the envelope pieces."""
    if not lam > 1.0:
        raise ValueError("need lam > 1")
    if env is None:
        env = compile_envelope(f, "plus")
    thr = float(lam) ** k
    ivs = tuple((float(a), float(b)) for a, b in env.superlevel(thr))
    return LevelComponents(int(k), float(lam), thr, ivs)


def _auto_krange(env: Envelope, lam: float) -> Optional[Tuple[int, int]]:
    """Dynamic range of the envelope over the source's support hull,
    expressed in lam-scales: positive values outside it only decay."""
    t = env.source.breakpoints
    t0, t1 = float(t[0]), float(t[-1])
    lows, tops = [], []
    for k in range(len(env.lo)):
        lo = max(env.lo[k], t0)
        hi = min(env.hi[k], t1)
        if not lo < hi:
            continue
        if env.c1[k] == 0.0:
            vlo = vhi = env.beta[k]
        else:
            vlo = env.beta[k] + env.c1[k] / (env.pole[k] - lo)
            vhi = env.beta[k] + env.c1[k] / (env.pole[k] - hi)
        lows.append(vlo)  # plus-side pieces are nondecreasing
        tops.append(vhi)
    pos = [v for v in lows if v > 0.0]
    if not pos or max(tops) <= 0.0:
        return None
    # scale k covers values in (lam^k, lam^{k+1}]: the bottom scale must sit
    # strictly below the smallest value, the top scale at or above the largest
    kmin = math.floor(math.log(min(pos)) / math.log(lam))
    while lam**kmin >= min(pos):
        kmin -= 1
    kmax = math.ceil(math.log(max(tops)) / math.log(lam))
    while lam ** (kmax - 1) >= max(tops):
        kmax -= 1
    return kmin, kmax


def _halve(sigma: StepFunction, a: float, b: float, depth: int) -> HalvingChain:
    t = sigma.breakpoints
    cum = sigma.cumulative_many(t)
    cb = float(sigma.cumulative(b))
    m0 = cb - float(sigma.cumulative(a))
    if not m0 > 0.0:
        raise ValueError("halving requires positive mass on the component")
    pts = [a]
    masses = [m0]
    for i in range(1, depth + 1):
        target = cb - m0 / 2.0**i  # leftmost x with cum(x) = target
        j = int(np.searchsorted(cum, target, side="left"))
        if j == 0:
            x = float(t[0])
        elif j >= len(t) or cum[j] == target:
            x = float(t[min(j, len(t) - 1)])
        else:
            x = float(t[j - 1] + (target - cum[j - 1]) / sigma.values[j - 1])
        x = min(max(x, a), b)
        pts.append(x)
        masses.append(cb - float(sigma.cumulative(x)))
    return HalvingChain(Interval(a, b), tuple(pts), tuple(masses))


def _entries(e_list, pts) -> Tuple[Optional[float], ...]:
    out = []
    for xi, xn in zip(pts[:-1], pts[1:]):
        hit = None
        for u, v in e_list:
            if v > xi and u < xn:
                hit = max(u, xi)
                break
        out.append(hit)
    return tuple(out)


def build_transcript(
    f: StepFunction,
    lam: float,
    krange: Optional[Tuple[int, int]],
    sigma: StepFunction,
    halving_depth: int = 4,
) -> DecompTranscript:
    """Assemble every level in the (clipped) band, carving each component
    against the next level and attaching sigma-halving chains.

    Empty levels inside the band are kept as empty tuples so telescoping
    length identities hold verbatim. Components carrying no sigma-mass get
    no chain (sigma is only required to be positive where halving is
    actually queried).
    """
    if not lam > 1.0:
        raise ValueError("need lam > 1")
    if halving_depth < 1:
        raise ValueError("need halving_depth >= 1")
    env = compile_envelope(f, "plus")
    auto = _auto_krange(env, lam)
    if auto is None:
        kr = (0, -1) if krange is None else (krange[0], krange[0] - 1)
        return DecompTranscript(float(lam), kr, (), (), (), (), ())
    kmin, kmax = auto
    if krange is not None:
        kmin, kmax = max(kmin, int(krange[0])), min(kmax, int(krange[1]))
    levels = []
    e_sets = []
    f_sets = []
    chains = []
    tilde = []
    upper = {}  # superlevel cache across adjacent levels

    def olist(k: int):
        if k not in upper:
            upper[k] = [(float(a), float(b)) for a, b in env.superlevel(lam**k)]
        return upper[k]

    for k in range(kmin, kmax + 1):
        comp = olist(k)
        nxt = olist(k + 1)
        levels.append(
            LevelComponents(k, float(lam), float(lam) ** k, tuple(comp))
        )
        carved = []
        lvl_chains = []
        lvl_tilde = []
        for a, b in comp:
            e = subtract_lists([(a, b)], nxt)
            carved.append(tuple(e))
            mass = sigma.cumulative(b) - sigma.cumulative(a)
            if mass > 0.0:
                ch = _halve(sigma, a, b, halving_depth)
                lvl_chains.append(ch)
                lvl_tilde.append(_entries(e, ch.points))
        e_sets.append(tuple(carved))
        f_sets.append(tuple(complement_list(olist(k + 2))))
        chains.append(tuple(lvl_chains))
        tilde.append(tuple(lvl_tilde))
    return DecompTranscript(
        float(lam),
        (kmin, kmax),
        tuple(levels),
        tuple(e_sets),
        tuple(f_sets),
        tuple(chains),
        tuple(tilde),
    )


# ---------------------------------------------------------------------------
# covering lemmas


def verify_key_lemma(
    f: StepFunction,
    lam1: float,
    lam2: float,
    x: float,
    ys: Sequence[float],
    tol: float = 1e-12,
) -> ClaimResult:
    """At any point where M+f <= lam1, every window (x, y) to the right is
    filled by {M+f <= lam2} in proportion at least 1 - lam1/lam2.

    Returns the worst-slack instance over ys. Raises if x fails the
    pointwise precondition or some y lies left of x.
    """
    if not (lam2 > lam1 > 0.0):
        raise ValueError("need lam2 > lam1 > 0")
    env = compile_envelope(f, "plus")
    if env.value(x) > lam1 * (1.0 + 1e-12):
        raise ValueError("x is not a lam1-point")
    olist = [(float(a), float(b)) for a, b in env.superlevel(lam2)]
    frac = 1.0 - lam1 / lam2
    worst = (math.inf, x, 0.0, 0.0)
    for y in ys:
        if y < x:
            raise ValueError("window endpoints must satisfy y >= x")
        need = frac * (y - x)
        got = (y - x) - total_length(intersect_lists([(x, y)], olist))
        slack = got - need
        if slack < worst[0]:
            worst = (slack, y, need, got)
    slack, y, need, got = worst
    return ClaimResult(
        "decomp:filling",
        f"x={x:.6g},y={y:.6g}",
        need,
        got,
        tol,
        {"slack": slack, "lam1": lam1, "lam2": lam2, "windows": len(list(ys))},
    )


def verify_rwtype(
    sigma: StepFunction,
    A: Sequence[Tuple[float, float]],
    a0: float,
    eta: float,
    r: float,
    zs: Sequence[float],
    R: int = 8,
    gate: float = 100.0,
) -> ClaimResult:
    """Reverse-type density estimate, report-only.

    For a set A right-dense from a0 (|A cap (a0,z)| > eta (z - a0) for the
    probed z), the sigma-mass of (a0, z) is compared against the sigma-mass
    of A cap (a0, z). The worst ratio is reported next to the bound shape
    (restricted-constant / eta)^r; the gate multiplier is a recorded
    regression level, not a theorem constant.
    """
    if not (0.0 < eta < 1.0):
        raise ValueError("need eta in (0,1)")
    if not r > 1.0:
        raise ValueError("need r > 1")
    A = sorted((float(u), float(v)) for u, v in A)
    for u, v in A:
        if not u < v:
            raise ValueError("degenerate interval in A")
    for u1, v1 in zip(A, A[1:]):
        if u1[1] > v1[0]:
            raise ValueError("intervals of A must be disjoint")
    worst = 0.0
    worst_z = None
    for z in zs:
        if not z > a0:
            raise ValueError("probe points must lie right of a0")
        dens = total_length(intersect_lists([(a0, z)], A))
        if not dens > eta * (z - a0):
            raise ValueError(f"density precondition fails at z={z:.6g}")
        num = sigma.cumulative(z) - sigma.cumulative(a0)
        den = _mass_on(sigma, intersect_lists([(a0, z)], A))
        ratio = math.inf if den <= 0.0 < num else (0.0 if num <= 0.0 else num / den)
        if ratio > worst:
            worst = ratio
            worst_z = z
    rep = restricted_minus(sigma, r, R=R)
    shape = (rep.value / eta) ** r
    return ClaimResult(
        "decomp:mass-density",
        f"a0={a0:.6g},z={worst_z:.6g}" if worst_z is not None else f"a0={a0:.6g}",
        worst,
        gate * shape,
        1e-9,
        {
            "bound_shape": shape,
            "gate_multiplier": gate,
            "restricted_constant": rep.value,
            "eta": eta,
            "r": r,
            "report_only": True,
        },
    )
