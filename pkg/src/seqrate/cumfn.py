"""Piecewise-linear cumulative functions on [0, 1].

A cumulative function (a CRDF or CLDF) is stored as an ordered list of
knots ``(alpha, pre, post)``.  The function is linear between one knot's
``post`` value and the next knot's ``pre`` value; ``pre < post`` encodes a
jump.  The function takes the ``post`` value at the knot itself, so ``pre``
is the left limit and the represented function is continuous from the
right.  ``+inf`` levels are reserved for leakage budgets ("no constraint
from here on") and may only appear as a terminal segment.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable

INF = math.inf

# user-supplied knots closer than this in alpha are rejected as degenerate
MIN_KNOT_SPACING = 1e-12
# two adjacent segments whose slopes differ by less than this are merged
SLOPE_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class Knot:
    """One breakpoint: left limit ``pre``, right-continuous value ``post``."""

    alpha: float
    pre: float
    post: float


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_regular`; empty ``violations`` means valid."""

    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class CumulativeFunction:
    knots: tuple[Knot, ...]

    def __post_init__(self):
        if not self.knots:
            raise ValueError("a cumulative function needs at least one knot")
        object.__setattr__(self, "knots", tuple(self.knots))

    # -- constructors -------------------------------------------------

    @classmethod
    def from_knots(cls, triples: Iterable[tuple[float, float, float]]) -> "CumulativeFunction":
        return cls(tuple(Knot(float(a), float(p), float(q)) for a, p, q in triples))

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]]) -> "CumulativeFunction":
        """Continuous piecewise-linear interpolant through ``(alpha, value)`` points."""
        return cls(tuple(Knot(float(a), float(v), float(v)) for a, v in points))

    @classmethod
    def line(cls, total: float) -> "CumulativeFunction":
        """The ramp ``alpha -> total * alpha``."""
        return cls.from_points([(0.0, 0.0), (1.0, float(total))])

    @classmethod
    def step(cls, at: float, level: float, final: float | None = None) -> "CumulativeFunction":
        """Zero before ``at``, then ``level``; optionally jumping to ``final`` at 1."""
        last = level if final is None else final
        ks = [Knot(0.0, 0.0, 0.0)]
        if at < 1.0:
            ks.append(Knot(float(at), 0.0, float(level)))
            ks.append(Knot(1.0, float(level), float(last)))
        else:
            ks.append(Knot(1.0, 0.0, float(level)))
        return cls(tuple(ks))

    @classmethod
    def unbounded(cls) -> "CumulativeFunction":
        """The everywhere-infinite leakage budget (no constraint at all)."""
        return cls((Knot(0.0, INF, INF), Knot(1.0, INF, INF)))

    # -- evaluation ----------------------------------------------------

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(k.alpha for k in self.knots)

    def evaluate(self, alpha: float, side: str = "right") -> float:
        """Value at ``alpha``; ``side='left'`` gives the left limit at a knot.

        Off the knots the function is continuous, so the side is irrelevant
        there.  The left limit does not exist at alpha = 0.
        """
        if side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        ks = self.knots
        if not ks[0].alpha <= alpha <= ks[-1].alpha:
            raise ValueError(f"alpha {alpha} outside domain [{ks[0].alpha}, {ks[-1].alpha}]")
        i = bisect_right(self.alphas, alpha) - 1
        if ks[i].alpha == alpha:
            if side == "right":
                return ks[i].post
            if i == 0:
                raise ValueError("left limit undefined at the domain's left end")
            return ks[i].pre
        lo, hi = ks[i], ks[i + 1]
        if lo.post == INF or hi.pre == INF:
            return INF
        t = (alpha - lo.alpha) / (hi.alpha - lo.alpha)
        return lo.post + t * (hi.pre - lo.post)

    def __call__(self, alpha: float) -> float:
        return self.evaluate(alpha, "right")

    # -- serialization (the JSON knot schema consumed by the CLI) -----

    def to_json_dict(self) -> dict:
        def enc(v: float):
            return "inf" if v == INF else v

        return {"knots": [{"alpha": k.alpha, "pre": enc(k.pre), "post": enc(k.post)}
                          for k in self.knots]}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "CumulativeFunction":
        if not isinstance(obj, dict) or set(obj) != {"knots"}:
            raise ValueError("knot schema must be exactly {'knots': [...]}")

        def dec(v) -> float:
            if v == "inf":
                return INF
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueError(f"knot value must be a number or 'inf', got {v!r}")
            return float(v)

        knots = []
        for item in obj["knots"]:
            if not isinstance(item, dict) or set(item) != {"alpha", "pre", "post"}:
                raise ValueError("each knot must have exactly the keys alpha/pre/post")
            knots.append(Knot(dec(item["alpha"]), dec(item["pre"]), dec(item["post"])))
        return cls(tuple(knots))


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function on the grid {j/k}: ``levels[j]`` on
    [j/k, (j+1)/k), and ``levels[k]`` at alpha = 1."""

    k: int
    levels: tuple[float, ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("block count k must be >= 1")
        if len(self.levels) != self.k + 1:
            raise ValueError(f"need k+1 = {self.k + 1} levels, got {len(self.levels)}")
        if self.levels[0] != 0.0:
            raise ValueError("step function must start at 0")
        for a, b in zip(self.levels, self.levels[1:]):
            if b < a:
                raise ValueError("step levels must be non-decreasing")
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))

    def increments(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.levels, self.levels[1:]))

    def as_cumulative(self) -> CumulativeFunction:
        ks = [Knot(0.0, 0.0, 0.0)]
        for j in range(1, self.k + 1):
            ks.append(Knot(j / self.k, self.levels[j - 1], self.levels[j]))
        return CumulativeFunction(tuple(ks))


# ---------------------------------------------------------------------
# validation


def validate_regular(F: CumulativeFunction, allow_infinite: bool = False) -> ValidationReport:
    """Check the regularity properties of a cumulative function.

    Reports every violated property among cumulation (non-decreasing,
    non-negative), zero-initial-value, right-continuity of the knot
    encoding, and domain coverage.  With ``allow_infinite`` (leakage
    budgets) ``+inf`` levels are legal on a terminal segment, and an
    everywhere-infinite function is accepted.
    """
    ks = F.knots
    bad: list[str] = []

    alphas_ok = all(math.isfinite(k.alpha) for k in ks)
    if not alphas_ok:
        bad.append("domain-coverage: non-finite knot position")
    else:
        if ks[0].alpha != 0.0 or ks[-1].alpha != 1.0:
            bad.append("domain-coverage: knots must span alpha = 0 to alpha = 1")
        if any(b.alpha - a.alpha < MIN_KNOT_SPACING for a, b in zip(ks, ks[1:])):
            bad.append("domain-coverage: knot positions not increasing or closer than 1e-12")

    values = [v for k in ks for v in (k.pre, k.post)]
    if any(math.isnan(v) for v in values):
        bad.append("cumulation: NaN level")
        return ValidationReport(tuple(bad))
    if any(v < 0.0 for v in values):
        bad.append("cumulation: negative level")
    if not allow_infinite and any(v == INF for v in values):
        bad.append("cumulation: infinite level only allowed in a leakage budget")

    if any(k.pre > k.post for k in ks):
        bad.append("right-continuity: pre value exceeds post value at a knot")
    # an infinite left limit must be preceded by an infinite segment
    for a, b in zip(ks, ks[1:]):
        if b.pre == INF and a.post != INF:
            bad.append("right-continuity: infinite level must start with a jump at a knot")
            break

    if any(a.post > b.pre for a, b in zip(ks, ks[1:])):
        bad.append("cumulation: decreasing across a segment")

    first = ks[0].post
    if not (first == 0.0 or (allow_infinite and first == INF)):
        bad.append("zero-initial-value: F(0) must be 0")

    return ValidationReport(tuple(bad))


def require_valid(F: CumulativeFunction, allow_infinite: bool = False, name: str = "function") -> None:
    report = validate_regular(F, allow_infinite=allow_infinite)
    if not report.ok:
        raise ValueError(f"invalid {name}: " + "; ".join(report.violations))


# ---------------------------------------------------------------------
# algebra


def _canonical(knots: list[Knot]) -> tuple[Knot, ...]:
    """Drop interior knots that neither jump nor change the slope."""
    out: list[Knot] = [knots[0]]
    for i in range(1, len(knots) - 1):
        k = knots[i]
        if k.pre != k.post:
            out.append(k)
            continue
        prev = out[-1]
        nxt = knots[i + 1]
        if prev.post == INF:  # inside an infinite tail
            continue
        left = (k.pre - prev.post) * (nxt.alpha - k.alpha)
        right = (nxt.pre - k.post) * (k.alpha - prev.alpha)
        scale = max(abs(left), abs(right), 1.0)
        if math.isfinite(left) and math.isfinite(right) and abs(left - right) <= SLOPE_MERGE_TOL * scale:
            continue
        out.append(k)
    out.append(knots[-1])
    return tuple(out)


def clip_shift(F: CumulativeFunction, c: float) -> CumulativeFunction:
    """The function ``alpha -> max(0, F(alpha) - c)`` for an offset c >= 0.

    A new knot is inserted wherever a linear segment of F crosses level c,
    so the result is again an exact piecewise-linear representation.
    """
    require_valid(F, allow_infinite=True)
    if not c >= 0.0:
        raise ValueError(f"offset must be >= 0, got {c}")
    if c == 0.0:
        return F

    augmented: list[Knot] = []
    for i, k in enumerate(F.knots):
        augmented.append(k)
        if i + 1 == len(F.knots):
            break
        nxt = F.knots[i + 1]
        v0, v1 = k.post, nxt.pre
        if v0 < c < v1 and math.isfinite(v1):
            a = k.alpha + (c - v0) * (nxt.alpha - k.alpha) / (v1 - v0)
            if a - k.alpha > MIN_KNOT_SPACING and nxt.alpha - a > MIN_KNOT_SPACING:
                augmented.append(Knot(a, c, c))

    def clip(v: float) -> float:
        return v if v == INF else max(0.0, v - c)

    clipped = [Knot(k.alpha, clip(k.pre), clip(k.post)) for k in augmented]
    return CumulativeFunction(_canonical(clipped))


def leakage_offset(G: CumulativeFunction, L: CumulativeFunction) -> tuple[float, float]:
    """Largest excess of the rate schedule over the leakage budget.

    Returns ``(c, beta)`` with ``c = max(0, sup_beta G(beta) - L(beta))``.
    Both functions are piecewise-linear, so the supremum is attained at a
    knot of one of them, approached from the left or the right; ties are
    broken toward the smallest beta.
    """
    require_valid(G, name="CRDF")
    require_valid(L, allow_infinite=True, name="CLDF")
    best = -INF
    arg = 0.0
    for alpha in sorted(set(G.alphas) | set(L.alphas)):
        sides = ("right",) if alpha == 0.0 else ("left", "right")
        for side in sides:
            gap = G.evaluate(alpha, side) - L.evaluate(alpha, side)
            if gap > best:
                best = gap
                arg = alpha
    return max(0.0, best), arg


def effective_crdf(
    G: CumulativeFunction,
    L: CumulativeFunction,
    mode: str = "lossy",
    entropy_bits: float | None = None,
) -> CumulativeFunction:
    """Usable part of the rate schedule once the leakage budget is respected.

    In lossy mode the withheld offset is ``max(0, sup(G - L))``; the result
    never exceeds L anywhere.  In lossless mode the offset is
    ``max(0, G(1) - H)`` for source entropy H (pass ``entropy_bits``),
    discarding rate beyond what lossless reconstruction can ever use.
    """
    require_valid(G, name="CRDF")
    if mode == "lossy":
        c, _ = leakage_offset(G, L)
    elif mode == "lossless":
        if entropy_bits is None or entropy_bits < 0.0:
            raise ValueError("lossless mode needs entropy_bits >= 0")
        require_valid(L, allow_infinite=True, name="CLDF")
        c = max(0.0, G.evaluate(1.0) - entropy_bits)
    else:
        raise ValueError(f"mode must be 'lossy' or 'lossless', got {mode!r}")
    return clip_shift(G, c)


def sample_grid(F: CumulativeFunction, k: int) -> StepFunction:
    """Floor-sample F on the grid {j/k}: the step ``alpha -> F(floor(alpha k)/k)``."""
    require_valid(F)
    if k < 1:
        raise ValueError("block count k must be >= 1")
    return StepFunction(k, tuple(F.evaluate(j / k) for j in range(k + 1)))


def same_function(F: CumulativeFunction, G: CumulativeFunction, tol: float = 1e-12) -> bool:
    """Pointwise equality on the union of knots, both jump sides."""
    for alpha in sorted(set(F.alphas) | set(G.alphas)):
        sides = ("right",) if alpha == 0.0 else ("left", "right")
        for side in sides:
            a, b = F.evaluate(alpha, side), G.evaluate(alpha, side)
            if a == b:
                continue
            if abs(a - b) > tol:
                return False
    return True
