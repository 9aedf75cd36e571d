"""Shared builders and hypothesis strategies for the test suite."""

import numpy as np
from hypothesis import strategies as st

from onesided import StepFunction


def indicator(a=0.0, b=1.0):
    return StepFunction([a, b], [1.0])


def constant(value=1.0, a=0.0, b=1.0):
    return StepFunction([a, b], [value])


def random_step(rng, n_pieces, domain=(0.0, 6.0), values=(0.25, 4.0),
                zero_frac=0.0, min_gap_frac=1e-3):
    """Random step function with a minimum piece width.

    The gap floor keeps chord denominators well conditioned, so direct
    maximization stays trustworthy at full float accuracy.
    """
    d0, d1 = domain
    while True:
        cuts = np.sort(rng.uniform(d0, d1, size=n_pieces - 1))
        bp = np.concatenate([[d0], cuts, [d1]])
        if n_pieces == 1 or np.min(np.diff(bp)) >= (d1 - d0) * min_gap_frac:
            break
    vals = np.exp(rng.uniform(np.log(values[0]), np.log(values[1]), size=n_pieces))
    if zero_frac > 0.0:
        dead = rng.random(n_pieces) < zero_frac
        if dead.all():
            dead[rng.integers(n_pieces)] = False
        vals = np.where(dead, 0.0, vals)
    return StepFunction(list(bp), list(vals))


def random_weight(rng, max_pieces=6, domain=(0.0, 6.0), values=(0.25, 4.0)):
    n = int(rng.integers(1, max_pieces + 1))
    return random_step(rng, n, domain=domain, values=values)


@st.composite
def step_functions(draw, max_pieces=6, lo=0.25, hi=4.0, zeros=False):
    """Step functions with pieces of width >= 0.1 starting near the origin."""
    n = draw(st.integers(min_value=1, max_value=max_pieces))
    gaps = draw(st.lists(st.floats(0.1, 2.0), min_size=n, max_size=n))
    start = draw(st.floats(-2.0, 2.0))
    bp = np.concatenate([[start], start + np.cumsum(gaps)])
    vs = st.floats(lo, hi)
    if zeros:
        vs = st.one_of(st.just(0.0), vs)
    vals = draw(st.lists(vs, min_size=n, max_size=n))
    if zeros and all(v == 0.0 for v in vals):
        vals[0] = 1.0
    return StepFunction(list(bp), vals)


def weights(max_pieces=6, lo=0.25, hi=4.0):
    return step_functions(max_pieces=max_pieces, lo=lo, hi=hi, zeros=False)
