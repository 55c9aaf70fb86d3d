"""Bounded-Lipschitz (Dudley) distance between finite atomic measures.

``dbl(mu, nu) = sup { integral f d(mu - nu) : |f| <= 1, Lip(f) <= 1 }``
with the Lipschitz constant taken in a line coordinate.  Measures on the
positive reals are compared in the log coordinate, where the group is a
line.

For atomic measures the supremum is a linear program whose variables are
the values of ``f`` at the atom locations; only adjacent-gap Lipschitz
constraints bind.  We solve it by a sweep that maintains the concave
piecewise-linear value function

    V_i(y) = max { sum_{j<=i} d_j f_j : f_i = y, constraints up to i }

on [-1, 1].  Passing to atom ``i+1`` applies a sliding-window maximum of
radius ``gap_i`` (which keeps concavity) and adds the linear term
``d_{i+1} y``.  The answer is ``max V_n``.  Everything is deterministic
float arithmetic; the only irrational inputs are the log locations.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

# A concave piecewise-linear function is a list of (x, value) breakpoints
# with strictly increasing x covering the current domain.


def _evaluate(bps: list[tuple[float, float]], x: float) -> float:
    if x <= bps[0][0]:
        return bps[0][1]
    if x >= bps[-1][0]:
        return bps[-1][1]
    for (x0, v0), (x1, v1) in zip(bps, bps[1:]):
        if x0 <= x <= x1:
            if x1 == x0:
                return max(v0, v1)
            lam = (x - x0) / (x1 - x0)
            return v0 + lam * (v1 - v0)
    raise AssertionError("unreachable")


def _clip(bps: list[tuple[float, float]], lo: float, hi: float) -> list[tuple[float, float]]:
    vlo = _evaluate(bps, lo)
    vhi = _evaluate(bps, hi)
    inner = [(x, v) for x, v in bps if lo < x < hi]
    return [(lo, vlo)] + inner + [(hi, vhi)]


def _max_filter(bps: list[tuple[float, float]], radius: float) -> list[tuple[float, float]]:
    """Sliding-window maximum of a concave function, then clip to [-1, 1]."""
    peak = max(v for _, v in bps)
    # The peak of a concave PL function is a breakpoint or a plateau of them.
    peak_xs = [x for x, v in bps if v == peak]
    xm, xM = peak_xs[0], peak_xs[-1]
    out: list[tuple[float, float]] = []
    for x, v in bps:
        if x < xm:
            out.append((x - radius, v))
    out.append((xm - radius, peak))
    out.append((xM + radius, peak))
    for x, v in bps:
        if x > xM:
            out.append((x + radius, v))
    return _clip(out, -1.0, 1.0)


def _add_linear(bps: list[tuple[float, float]], slope: float) -> list[tuple[float, float]]:
    return [(x, v + slope * x) for x, v in bps]


def dbl_line(atoms: Sequence[tuple[float, Fraction]]) -> float:
    """Optimal value for one signed atomic measure on the line.

    ``atoms`` are (position, signed weight); positions need not be sorted
    and equal positions are merged.
    """
    merged: dict[float, Fraction] = {}
    for x, d in atoms:
        merged[x] = merged.get(x, Fraction(0)) + Fraction(d)
    sites = sorted((x, float(d)) for x, d in merged.items() if d)
    if not sites:
        return 0.0
    x_prev, d0 = sites[0]
    bps = [(-1.0, -d0), (1.0, d0)]
    for x, d in sites[1:]:
        bps = _max_filter(bps, x - x_prev)
        bps = _add_linear(bps, d)
        x_prev = x
    return max(0.0, max(v for _, v in bps))


def dbl_rx(a, b) -> float:
    """Dudley distance between two atomic measures on the positive reals,
    computed in the log coordinate.  Accepts :class:`RxMeasure` values or
    iterables of ``(t, w)`` pairs with exact rational ``t``."""
    signed: dict[Fraction, Fraction] = {}
    for t, w in getattr(a, "atoms", a):
        signed[Fraction(t)] = signed.get(Fraction(t), Fraction(0)) + Fraction(w)
    for t, w in getattr(b, "atoms", b):
        signed[Fraction(t)] = signed.get(Fraction(t), Fraction(0)) - Fraction(w)
    return dbl_line([(math.log(t), d) for t, d in signed.items() if d])
