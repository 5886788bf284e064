"""Finite-alphabet sources, distortion measures, and distortion-rate curves.

Closed forms are used where the measure admits one (erasure, log-loss,
binary Hamming); arbitrary distortion matrices go through Blahut-Arimoto
alternating minimization, traced along the curve by the Lagrangian slope.
All rates are in bits per symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf

PMF_TOL = 1e-12
BA_TOL = 1e-9
BA_MAX_ITER = 100_000
BISECT_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """Alternating minimization did not settle within the iteration cap."""


@dataclass(frozen=True)
class SourceModel:
    """IID source given by its pmf over a finite alphabet."""

    pmf: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.pmf)
        if len(p) < 1:
            raise ValueError("alphabet must have at least one letter")
        if any(x < 0.0 or not math.isfinite(x) for x in p):
            raise ValueError("pmf entries must be finite and >= 0")
        if abs(sum(p) - 1.0) > PMF_TOL:
            raise ValueError(f"pmf must sum to 1 within {PMF_TOL}, got {sum(p)}")
        object.__setattr__(self, "pmf", p)

    def __len__(self) -> int:
        return len(self.pmf)


def entropy(source: SourceModel) -> float:
    """H(X) in bits, with 0 log 0 = 0."""
    return -sum(p * math.log2(p) for p in source.pmf if p > 0.0)


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError("binary entropy argument must be in [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


@dataclass(frozen=True)
class DistortionSpec:
    """Per-letter distortion: a named kind or an explicit matrix.

    Matrix entries may be ``+inf`` (forbidden reconstructions, as in the
    erasure measure).  Every row needs at least one finite entry so zero
    distortion at full rate is meaningful; boundedness of the zero-rate
    distortion additionally depends on the source and is checked when a
    curve is built.
    """

    kind: str
    matrix: tuple[tuple[float, ...], ...] | None = None

    _KINDS = ("hamming", "erasure", "log_loss", "matrix")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"distortion kind must be one of {self._KINDS}")
        if self.kind == "matrix":
            if not self.matrix:
                raise ValueError("matrix distortion needs a matrix")
            rows = tuple(tuple(float(v) for v in row) for row in self.matrix)
            width = len(rows[0])
            if width < 1 or any(len(r) != width for r in rows):
                raise ValueError("distortion matrix must be rectangular and non-empty")
            for r in rows:
                if any(math.isnan(v) or v < 0.0 for v in r):
                    raise ValueError("distortion entries must be >= 0 (inf allowed)")
                if not any(math.isfinite(v) for v in r):
                    raise ValueError("every source letter needs a finite-distortion reconstruction")
            object.__setattr__(self, "matrix", rows)
        elif self.matrix is not None:
            raise ValueError(f"kind {self.kind!r} does not take an explicit matrix")

    def as_matrix(self, alphabet_size: int) -> tuple[tuple[float, ...], ...]:
        if self.kind == "hamming":
            return tuple(tuple(0.0 if i == j else 1.0 for j in range(alphabet_size))
                         for i in range(alphabet_size))
        if self.kind == "erasure":
            if alphabet_size != 2:
                raise ValueError("erasure distortion is defined for a binary source")
            return ((0.0, INF, 1.0), (INF, 0.0, 1.0))
        if self.kind == "matrix":
            assert self.matrix is not None
            if len(self.matrix) != alphabet_size:
                raise ValueError("distortion matrix rows must match the alphabet size")
            return self.matrix
        raise ValueError("log-loss reconstructs onto the probability simplex; "
                         "it has no finite matrix, use the closed-form curve")


def d_max(source: SourceModel, spec: DistortionSpec) -> float:
    """Zero-rate distortion: best single reconstruction letter, min over
    columns of E[d(X, xhat)].  By convexity nothing beats a pure letter at
    rate 0."""
    mat = spec.as_matrix(len(source))
    best = INF
    for j in range(len(mat[0])):
        val = sum(p * mat[i][j] for i, p in enumerate(source.pmf) if p > 0.0)
        best = min(best, val)
    return best


@dataclass(frozen=True)
class RDCurve:
    """Distortion-rate relation D(R): analytic or a sampled convex table.

    * ``linear``: R(D) = c - D on [0, c], so D(R) = max(0, c - R).
    * ``hamming_binary``: D(R) inverts R(D) = h(p) - h(D) for D <= p.
    * ``sampled``: convex non-increasing table starting at (0, d_max);
      chords overestimate the true convex curve, so interpolated values
      are safe (conservative) upper bounds.
    """

    kind: str
    c: float | None = None
    p: float | None = None
    points: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind == "linear":
            if self.c is None or not (self.c > 0.0 and math.isfinite(self.c)):
                raise ValueError("linear curve needs a finite c > 0")
        elif self.kind == "hamming_binary":
            if self.p is None or not 0.0 <= self.p <= 0.5:
                raise ValueError("binary Hamming curve needs crossover p in [0, 0.5]")
        elif self.kind == "sampled":
            pts = tuple((float(r), float(d)) for r, d in (self.points or ()))
            if not pts:
                raise ValueError("sampled curve needs at least one point")
            if pts[0][0] != 0.0:
                raise ValueError("sampled curve must start at R = 0")
            if any(not (math.isfinite(r) and math.isfinite(d)) or d < 0.0 for r, d in pts):
                raise ValueError("sampled curve points must be finite with D >= 0")
            for (r0, d0), (r1, d1) in zip(pts, pts[1:]):
                if r1 <= r0:
                    raise ValueError("sampled curve rates must be strictly increasing")
                if d1 > d0 + 1e-12:
                    raise ValueError("sampled curve distortions must be non-increasing")
            for (r0, d0), (r1, d1), (r2, d2) in zip(pts, pts[1:], pts[2:]):
                lhs = (d1 - d0) * (r2 - r1)  # slope comparison, cross-multiplied
                rhs = (d2 - d1) * (r1 - r0)
                if lhs > rhs + 1e-9 * max(1.0, abs(lhs), abs(rhs)):
                    raise ValueError("sampled curve must be convex in R")
            object.__setattr__(self, "points", pts)
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    @property
    def d_max(self) -> float:
        if self.kind == "linear":
            return float(self.c)  # D(0) = c
        if self.kind == "hamming_binary":
            return float(self.p)
        return self.points[0][1]

    @property
    def d_min(self) -> float:
        if self.kind == "sampled":
            return self.points[-1][1]
        return 0.0


def distortion_at_rate(curve: RDCurve, rate: float) -> float:
    """Least attainable distortion at the given rate, D(R)."""
    if rate < 0.0:
        raise ValueError("rate must be >= 0")
    if curve.kind == "linear":
        return max(0.0, curve.c - rate)
    if curve.kind == "hamming_binary":
        p = curve.p
        if p == 0.0:
            return 0.0
        target = binary_entropy(p) - rate
        if target <= 0.0:
            return 0.0
        # invert h on [0, p] by bisection
        lo, hi = 0.0, p
        while hi - lo > BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if binary_entropy(mid) < target:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    pts = curve.points
    if rate >= pts[-1][0]:
        return pts[-1][1]
    for (r0, d0), (r1, d1) in zip(pts, pts[1:]):
        if r0 <= rate <= r1:
            t = (rate - r0) / (r1 - r0)
            return d0 + t * (d1 - d0)
    raise AssertionError("unreachable: rate inside table range")


def closed_form_curve(kind: str, source: SourceModel) -> RDCurve:
    """Analytic curves for the measures the theory solves exactly.

    erasure (uniform binary source): R(D) = 1 - D.
    log-loss (any finite source):    R(D) = H(X) - D.
    binary Hamming:                  R(D) = h(p) - h(D) for D <= p.
    """
    if kind == "erasure":
        if len(source) != 2 or abs(source.pmf[0] - 0.5) > 1e-9:
            raise ValueError("the erasure closed form needs a uniform binary source")
        return RDCurve(kind="linear", c=1.0)
    if kind == "log_loss":
        h = entropy(source)
        if h == 0.0:
            return RDCurve(kind="sampled", points=((0.0, 0.0),))
        return RDCurve(kind="linear", c=h)
    if kind == "hamming_binary":
        if len(source) != 2:
            raise ValueError("the binary Hamming closed form needs a binary source")
        return RDCurve(kind="hamming_binary", p=min(source.pmf))
    raise ValueError(f"no closed form for kind {kind!r}")


def blahut_arimoto_point(
    source: SourceModel,
    spec: DistortionSpec,
    slope: float,
    init: tuple[float, ...] | None = None,
    tol: float = BA_TOL,
    max_iter: int = BA_MAX_ITER,
) -> tuple[float, float]:
    """One point (R, D) of the rate-distortion curve at Lagrangian slope s <= 0.

    Standard alternating minimization: with weights w(x, y) = 2^(s d(x, y))
    the conditional is q(y) w / Z(x) and the output marginal is re-averaged
    under p.  Infinite-distortion transitions get weight exactly 0, so
    forbidden reconstructions never receive conditional mass.  Iteration
    stops when the Lagrangian value R - s D (monotone under the updates)
    changes by at most ``tol``.

    ``init`` seeds the output marginal; with a linear R(D) every point on
    the segment minimizes the Lagrangian at its slope, and the iteration
    then settles wherever the seed sits on the segment.
    """
    if slope > 0.0:
        raise ValueError("slope parameter must be <= 0")
    mat = np.asarray(spec.as_matrix(len(source)), dtype=float)
    p = np.asarray(source.pmf, dtype=float)
    keep = p > 0.0
    mat, p = mat[keep], p[keep]

    finite = np.isfinite(mat)
    w = np.where(finite, np.exp2(slope * np.where(finite, mat, 0.0)), 0.0)
    if np.any(w.sum(axis=1) == 0.0):
        raise ValueError("a source letter has no usable reconstruction at this slope")

    ny = mat.shape[1]
    if init is None:
        q = np.full(ny, 1.0 / ny)
    else:
        q = np.asarray(init, dtype=float)
        if q.shape != (ny,) or np.any(q < 0.0) or abs(q.sum() - 1.0) > PMF_TOL:
            raise ValueError("init must be a pmf over the reconstruction alphabet")

    prev = None
    for _ in range(max_iter):
        m = w * q
        z = m.sum(axis=1)
        cond = m / z[:, None]
        q = p @ cond
        value = -float(p @ np.log2(z))  # equals R - s D at a fixed point
        if prev is not None and abs(value - prev) <= tol:
            break
        prev = value
    else:
        raise ConvergenceError(f"no fixed point within {max_iter} iterations")

    joint = p[:, None] * cond
    dist = float(np.sum(joint[finite] * mat[finite]))
    mask = joint > 0.0
    rate = float(np.sum(joint[mask] * np.log2(cond[mask] / np.broadcast_to(q, cond.shape)[mask])))
    return max(0.0, rate), dist


def build_rd_curve(source: SourceModel, spec: DistortionSpec, n_points: int = 33) -> RDCurve:
    """Tabulate D(R) by sweeping the Lagrangian slope.

    The table is prepended with the zero-rate point (0, d_max) and pruned
    to its lower convex hull, which removes iteration noise and guarantees
    the convexity invariants of the sampled representation.
    """
    if n_points < 2:
        raise ValueError("need at least two slope points")
    dm = d_max(source, spec)
    if not math.isfinite(dm):
        raise ValueError("zero-rate distortion is infinite; the lossy analysis "
                         "needs a bounded distortion-rate function")
    if len(source) == 1 or all(p in (0.0, 1.0) for p in source.pmf):
        return RDCurve(kind="sampled", points=((0.0, dm),))

    pts: list[tuple[float, float]] = [(0.0, dm)]
    for mag in np.geomspace(0.05, 32.0, n_points):
        r, d = blahut_arimoto_point(source, spec, -float(mag))
        pts.append((r, d))
    pts.sort()

    # lower convex hull in the (R, D) plane; rates closer than 1e-9 are the
    # same curve point up to iteration noise
    hull: list[tuple[float, float]] = []
    for pt in pts:
        if hull and abs(pt[0] - hull[-1][0]) <= 1e-9:
            hull[-1] = (hull[-1][0], min(hull[-1][1], pt[1]))
            continue
        while len(hull) >= 2:
            (r0, d0), (r1, d1) = hull[-2], hull[-1]
            if (d1 - d0) * (pt[0] - r1) >= (pt[1] - d1) * (r1 - r0):
                hull.pop()
            else:
                break
        hull.append(pt)
    while len(hull) >= 2 and hull[-1][1] > hull[-2][1]:
        hull.pop()  # numerical uptick at the high-rate end
    return RDCurve(kind="sampled", points=tuple(hull))
