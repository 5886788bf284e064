"""Upper concave envelopes of cumulative functions.

The envelope of a piecewise-linear function is the upper hull of its knot
points (both jump sides), computed exactly with a monotone chain.  Its
segment slopes are the optimal per-block description rates.  An
independent Legendre-transform evaluation is provided as a numerical
cross-check of the hull.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .cumfn import SLOPE_MERGE_TOL, CumulativeFunction, require_valid


@dataclass(frozen=True)
class ConcaveEnvelope:
    """Continuous piecewise-linear concave function given by its kink points."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.knots) < 2:
            raise ValueError("an envelope needs at least two knots")

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(a for a, _ in self.knots)

    @property
    def segments(self) -> tuple[tuple[float, float, float], ...]:
        """(alpha_lo, alpha_hi, slope) for each linear piece."""
        out = []
        for (a0, v0), (a1, v1) in zip(self.knots, self.knots[1:]):
            out.append((a0, a1, (v1 - v0) / (a1 - a0)))
        return tuple(out)

    def value(self, alpha: float) -> float:
        if not self.knots[0][0] <= alpha <= self.knots[-1][0]:
            raise ValueError(f"alpha {alpha} outside envelope domain")
        i = bisect_right(self.alphas, alpha) - 1
        if i == len(self.knots) - 1:
            return self.knots[-1][1]
        (a0, v0), (a1, v1) = self.knots[i], self.knots[i + 1]
        return v0 + (alpha - a0) * (v1 - v0) / (a1 - a0)

    def slope(self, alpha: float, side: str = "right") -> float:
        """Slope of the segment on the requested side of ``alpha``.

        At a kink the two sides differ; the envelope has no distinguished
        value there, so the caller picks the side.
        """
        segs = self.segments
        if side == "right":
            if alpha >= segs[-1][1]:
                return segs[-1][2]
            for lo, hi, s in segs:
                if lo <= alpha < hi:
                    return s
        elif side == "left":
            if alpha <= segs[0][0]:
                raise ValueError("no left slope at the domain's left end")
            for lo, hi, s in segs:
                if lo < alpha <= hi:
                    return s
        else:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        raise ValueError(f"alpha {alpha} outside envelope domain")


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def concave_envelope(F: CumulativeFunction) -> ConcaveEnvelope:
    """Smallest concave majorant of a valid non-decreasing function.

    Candidate points are every knot's pre and post values; between knots
    the graph is linear, so the hull of the candidates is the hull of the
    whole graph.  Adjacent hull segments with slopes closer than 1e-12 are
    merged so the representation is canonical.
    """
    require_valid(F)
    per_alpha: dict[float, float] = {}
    for k in F.knots:
        v = max(k.pre, k.post)
        if k.alpha not in per_alpha or per_alpha[k.alpha] < v:
            per_alpha[k.alpha] = v
    pts = sorted(per_alpha.items())

    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0.0:
            hull.pop()
        hull.append(p)

    # merge near-equal adjacent slopes into one segment
    merged = [hull[0]]
    for i in range(1, len(hull) - 1):
        a0, v0 = merged[-1]
        a1, v1 = hull[i]
        a2, v2 = hull[i + 1]
        s1 = (v1 - v0) / (a1 - a0)
        s2 = (v2 - v1) / (a2 - a1)
        if abs(s1 - s2) > SLOPE_MERGE_TOL * max(1.0, abs(s1), abs(s2)):
            merged.append(hull[i])
    merged.append(hull[-1])
    return ConcaveEnvelope(tuple(merged))


def segment_slopes(E: ConcaveEnvelope, k: int) -> tuple[float, ...]:
    """Envelope increments on the grid: the description rate of each block."""
    if k < 1:
        raise ValueError("block count k must be >= 1")
    vals = [E.value(j / k) for j in range(k + 1)]
    return tuple(b - a for a, b in zip(vals, vals[1:]))


def legendre_value(F: CumulativeFunction, alpha: float, grid_points: int = 10001) -> float:
    """Envelope value at ``alpha`` via the conjugate-pair search.

    Evaluates ``min_a (a * alpha + b(a))`` with ``b(a) = sup_z F(z) - a z``
    over a uniform grid of slopes ``a`` covering [0, F(1)/alpha] (the
    envelope's slope at alpha always lies in that interval).  The result
    upper-bounds the exact envelope value and converges to it as the grid
    refines.  Serves as an oracle for :func:`concave_envelope` and is kept
    free of any hull machinery.
    """
    require_valid(F)
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1]")
    if grid_points < 1:
        raise ValueError("need at least one slope grid point")

    cands = {(k.alpha, k.pre) for k in F.knots} | {(k.alpha, k.post) for k in F.knots}
    f1 = F.evaluate(1.0)
    a = np.linspace(0.0, f1 / alpha, grid_points)
    b = np.full(grid_points, -np.inf)
    for z, v in cands:
        np.maximum(b, v - a * z, out=b)
    return float(np.min(a * alpha + b))
