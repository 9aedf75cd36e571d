"""Pure NumPy implementations of the hot kernels.

The compiled extension (``_kernels``) implements the same three contracts;
``_backend`` picks whichever is importable. Keep the algorithms in lockstep:
the envelope scan must emit identical pieces and the cell quadrature must
take identical refinement decisions, so the two lanes agree to rounding.
"""

from __future__ import annotations

import math

import numpy as np

_INF = math.inf

GL8_X, GL8_W = np.polynomial.legendre.leggauss(8)


def compile_plus(t: np.ndarray, F: np.ndarray, v: np.ndarray):
    """Scan for the upper envelope of forward-window averages.

    t: n+1 breakpoints, F: cumulative at breakpoints (F[0] = 0), v: n piece
    values. Returns (lo, hi, beta, c1, pole, ops) float64 arrays left-to-right
    covering (-inf, inf); a piece evaluates to beta + c1/(pole - x), with
    c1 == 0 marking a constant piece. ops counts hull pushes and pops.
    """
    n = len(v)
    pieces = [(t[n], _INF, 0.0, 0.0, 0.0)]  # right tail: no mass ahead
    hull_t = [float(t[n])]
    hull_F = [float(F[n])]
    ops = 1

    def push(tt: float, ff: float) -> int:
        # pop while the new edge would make the hull non-concave; popping on
        # equality keeps hull edge slopes strictly decreasing (dedupes
        # collinear vertices, which keeps argmax ties away from the scan)
        count = 0
        while len(hull_t) >= 2:
            s_new = (hull_F[-1] - ff) * (hull_t[-2] - hull_t[-1]) - (hull_F[-2] - hull_F[-1]) * (hull_t[-1] - tt)
            if s_new > 0.0:
                break
            hull_t.pop()
            hull_F.pop()
            count += 1
        hull_t.append(tt)
        hull_F.append(ff)
        return count + 1

    def emit_piece(xl: float, xr: float, A: float, B: float) -> None:
        # envelope on (xl, xr) where F(x) = A + B x; anchors = hull[:-1]
        m = len(hull_t) - 1
        if m == 0:
            pieces.append((xl, xr, B, 0.0, 0.0))
            return
        at = hull_t[-2::-1]  # nearest-to-farthest
        aF = hull_F[-2::-1]
        cur = 0
        c1_cur = aF[0] - A - B * at[0]
        if c1_cur <= 0.0:
            # the nearest anchor's chord never beats the small-h value here,
            # and by the x-free sign test no farther anchor does either
            pieces.append((xl, xr, B, 0.0, 0.0))
            return
        x_hi = xr
        while True:
            cU = aF[cur] - A
            tU = at[cur]
            best_root = -_INF
            best_k = -1
            for k in range(m):
                if k == cur:
                    continue
                cV = aF[k] - A
                tV = at[k]
                d0 = cU * tV - cV * tU
                d1 = (cV - cU) + B * (tU - tV)
                # chord_k passes chord_cur as x decreases only where the
                # affine difference D = d0 + d1 x drops through 0: d1 > 0
                if d1 <= 0.0:
                    continue
                root = -d0 / d1
                if root >= x_hi or root <= xl:
                    continue
                if root > best_root:
                    best_root = root
                    best_k = k
                elif root == best_root:
                    # simultaneous overtake: just left of the root the chord
                    # with the smaller slope c1/(t-x)^2 sits higher
                    gb = (aF[best_k] - A - B * at[best_k]) / (at[best_k] - root) ** 2
                    gk = (cV - B * tV) / (tV - root) ** 2
                    if gk < gb:
                        best_k = k
            if best_k < 0:
                pieces.append((xl, x_hi, B, aF[cur] - A - B * at[cur], at[cur]))
                return
            pieces.append((best_root, x_hi, B, aF[cur] - A - B * at[cur], at[cur]))
            x_hi = best_root
            cur = best_k

    for i in range(n, 0, -1):
        # piece (t[i-1], t[i]) carries value v[i-1]; hull covers P_i..P_n
        B = float(v[i - 1])
        A = float(F[i - 1]) - B * float(t[i - 1])
        emit_piece(float(t[i - 1]), float(t[i]), A, B)
        ops += push(float(t[i - 1]), float(F[i - 1]))
    emit_piece(-_INF, float(t[0]), 0.0, 0.0)  # left tail, F = 0 there

    pieces.reverse()
    lo, hi, beta, c1, pole = (np.array(col, dtype=np.float64) for col in zip(*pieces))
    return lo, hi, beta, c1, pole, ops


def _gl8_batch(a, b, beta, c1, pole, p, plus):
    """GL8 value of (beta + c1/(pole - x))^p on each (a, b), vectorized."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    xs = mid[:, None] + half[:, None] * GL8_X[None, :]
    if plus:
        ys = beta[:, None] + c1[:, None] / (pole[:, None] - xs)
    else:
        ys = beta[:, None] + c1[:, None] / (xs - pole[:, None])
    return half * ((ys**p) @ GL8_W)


def integrate_power_cells(a, b, beta, c1, pole, p, plus, tol_abs, tol_rel=0.0, max_depth=40):
    """Per-cell integral of (beta + c1/(pole - x))^p with adaptive halving.

    Each cell keeps its own absolute tolerance, split evenly when the cell
    splits; a segment also stops once its halving error is below tol_rel of
    its own value, so a near-pole spike costs one bisection chain instead of
    chasing an absolute target fixed before the spike was resolved. The
    refinement tree is identical to the scalar recursion. Returns (vals,
    errs) per input cell.
    """
    m = len(a)
    vals = np.zeros(m)
    errs = np.zeros(m)
    seg_a = np.asarray(a, dtype=np.float64)
    seg_b = np.asarray(b, dtype=np.float64)
    seg_beta = np.asarray(beta, dtype=np.float64)
    seg_c1 = np.asarray(c1, dtype=np.float64)
    seg_pole = np.asarray(pole, dtype=np.float64)
    seg_tol = np.asarray(tol_abs, dtype=np.float64).copy()
    seg_owner = np.arange(m)
    depth = 0
    while len(seg_a):
        whole = _gl8_batch(seg_a, seg_b, seg_beta, seg_c1, seg_pole, p, plus)
        mid = 0.5 * (seg_a + seg_b)
        left = _gl8_batch(seg_a, mid, seg_beta, seg_c1, seg_pole, p, plus)
        right = _gl8_batch(mid, seg_b, seg_beta, seg_c1, seg_pole, p, plus)
        fine = left + right
        err = np.abs(fine - whole)
        done = (err <= seg_tol) | (err <= tol_rel * np.abs(fine)) | (depth >= max_depth)
        np.add.at(vals, seg_owner[done], fine[done])
        np.add.at(errs, seg_owner[done], err[done])
        keep = ~done
        seg_a, seg_b, mid = seg_a[keep], seg_b[keep], mid[keep]
        seg_beta, seg_c1, seg_pole = seg_beta[keep], seg_c1[keep], seg_pole[keep]
        seg_tol, seg_owner = seg_tol[keep], seg_owner[keep]
        seg_a = np.concatenate([seg_a, mid])
        seg_b = np.concatenate([mid, seg_b])
        seg_beta = np.tile(seg_beta, 2)
        seg_c1 = np.tile(seg_c1, 2)
        seg_pole = np.tile(seg_pole, 2)
        seg_tol = np.tile(0.5 * seg_tol, 2)
        seg_owner = np.tile(seg_owner, 2)
        depth += 1
    return vals, errs


def form_max(U, V, D, e1, e2, e3):
    """argmax / max of U^e1 * V^e2 / D^e3 over aligned arrays.

    Ties keep the earliest index, so witnesses are reproducible.
    """
    vals = np.power(U, e1) * np.power(V, e2) / np.power(D, e3)
    if len(vals) == 0:
        return -1, -_INF
    idx = int(np.argmax(vals))
    return idx, float(vals[idx])
