"""Brute-force cross-checks, deliberately free of envelope machinery.

The schedule search enumerates, on a rate grid, how much of each block's
available rate is actually transmitted (leakage counts transmitted bits),
and for each such choice allocates description rates causally: bits
describing block j can only travel at times >= j, so description suffix
sums are capped by transmitted suffix sums.  The inner allocation is a
water-filling exchange search, exact on the grid because the objective is
separable convex over a base polytope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .cumfn import CumulativeFunction, require_valid
from .ratedist import RDCurve, distortion_at_rate
from .schedule import RateProfile, majorizes, rate_profile

STATE_CAP = 10 ** 8

_CONVEX_TEST_FUNCTIONS = ("square", "exp", "hinge")


@dataclass(frozen=True)
class BruteForceResult:
    min_distortion: float
    used: tuple[float, ...]
    descriptions: tuple[float, ...]
    grid_step: float


def _grid(cap: float, step: float) -> tuple[float, ...]:
    pts = []
    i = 0
    while i * step < cap - 1e-12:
        pts.append(i * step)
        i += 1
    pts.append(cap)  # the exact cap is always reachable, even off the lattice
    return tuple(pts)


def _improve_descriptions(r: list[float], floors: list[float], step: float,
                          dist) -> list[float]:
    """Exchange search: move one quantum at a time between blocks while the
    average distortion strictly improves and prefix sums stay above the
    transmitted prefixes (causality).  Best improving move first; distortion
    plateaus are walked toward the most even allocation (strictly shrinking
    sum of squares), so the argmin is deterministic and canonical."""
    k = len(r)

    def feasible(a: int, b: int) -> bool:
        if r[a] < step - 1e-12:
            return False
        if a < b:
            acc = 0.0
            for j in range(b):
                acc += r[j]
                if a <= j and acc - step < floors[j] - 1e-9:
                    return False
        return True

    def move_gain(a: int, b: int) -> float:
        return (dist(r[b]) - dist(r[b] + step)) - (dist(r[a] - step) - dist(r[a]))

    # phase 1: strictly improving transfers, best first
    while True:
        best_gain, best_move = 1e-12, None
        for a in range(k):
            for b in range(k):
                if b != a and feasible(a, b):
                    gain = move_gain(a, b)
                    if gain > best_gain:
                        best_gain, best_move = gain, (a, b)
        if best_move is None:
            break
        r[best_move[0]] -= step
        r[best_move[1]] += step

    # phase 2: walk distortion plateaus toward the most even allocation,
    # so ties resolve to a canonical argmin
    while True:
        best_drop, best_move = 1e-12, None
        for a in range(k):
            for b in range(k):
                if b == a or r[a] <= r[b] + step or not feasible(a, b):
                    continue
                if abs(move_gain(a, b)) > 1e-12:
                    continue
                drop = 2.0 * step * (r[a] - r[b] - step)  # decrease in sum of squares
                if drop > best_drop:
                    best_drop, best_move = drop, (a, b)
        if best_move is None:
            return r
        r[best_move[0]] -= step
        r[best_move[1]] += step


def brute_force_min_distortion(
    G: CumulativeFunction,
    L: CumulativeFunction,
    curve: RDCurve,
    k: int,
    grid_step: float = 0.05,
    exhaustive: bool = False,
) -> BruteForceResult:
    """Grid search for the least average distortion of a k-block schedule.

    Feasible points: transmitted amounts 0 <= used_i <= R_i with prefix
    sums capped by L(j/k), and description rates r_j >= 0 whose suffix
    sums never exceed the transmitted suffix sums.  Minimizes the average
    of D(k r_j).  ``exhaustive`` replaces the inner water-filling with a
    full grid sweep (k <= 2 only) for auditing the search itself.
    """
    require_valid(G, name="CRDF")
    require_valid(L, allow_infinite=True, name="CLDF")
    if not 1 <= k <= 4:
        raise ValueError("brute force supports k in 1..4")
    if grid_step < 0.01:
        raise ValueError("grid_step must be >= 0.01")
    if exhaustive and k > 2:
        raise ValueError("exhaustive mode supports k <= 2")

    avail = rate_profile(G, k)
    caps = [L.evaluate(j / k) for j in range(1, k + 1)]
    grids = [_grid(r, grid_step) for r in avail]

    states = 1
    for g in grids:
        states *= len(g)
    if exhaustive:
        states *= max(len(g) for g in grids) ** k
    if states > STATE_CAP:
        raise ValueError(f"search space of {states} states exceeds {STATE_CAP}")

    memo: dict[float, float] = {}

    def dist(r: float) -> float:
        # snap to the 1e-12 lattice so quantum-move accumulation noise
        # cannot blur exact grid values
        key = round(r, 12)
        if key not in memo:
            memo[key] = distortion_at_rate(curve, k * key)
        return memo[key]

    best_val = math.inf
    best_used: tuple[float, ...] = tuple([0.0] * k)
    best_desc: tuple[float, ...] = tuple([0.0] * k)

    for used in product(*grids):
        acc = 0.0
        ok = True
        for u, cap in zip(used, caps):
            acc += u
            if acc > cap + 1e-9:
                ok = False
                break
        if not ok:
            continue

        if exhaustive:
            total = sum(used)
            floors = list(RateProfile(used).prefix_sums())[:-1]
            r_best, v_best = None, math.inf
            marks = sorted({*(i * grid_step for i in range(int(total / grid_step + 1e-9) + 1)),
                            total, *floors})
            marks = [m for m in marks if -1e-12 <= m <= total + 1e-12]
            if k == 1:
                choices = [(total,)]
            else:
                choices = [(p1, total - p1) for p1 in marks if p1 >= floors[0] - 1e-12]
            for r in choices:
                v = sum(dist(x) for x in r) / k
                ss = sum(x * x for x in r)
                if v < v_best - 1e-12 or (abs(v - v_best) <= 1e-12
                                          and r_best is not None
                                          and ss < sum(x * x for x in r_best) - 1e-12):
                    v_best, r_best = v, r
            r = [round(x, 12) for x in r_best]
            val = sum(dist(x) for x in r) / k
        else:
            floors = list(RateProfile(used).prefix_sums())[:-1] + [-math.inf]
            r = _improve_descriptions(list(used), floors, grid_step, dist)
            val = sum(dist(x) for x in r) / k

        if val < best_val - 1e-15:
            best_val = val
            best_used = tuple(used)
            best_desc = tuple(r)

    return BruteForceResult(
        min_distortion=best_val,
        used=tuple(round(u, 12) for u in best_used),
        descriptions=tuple(round(x, 12) for x in best_desc),
        grid_step=grid_step,
    )


def majorization_property_check(
    x: "RateProfile | tuple[float, ...]",
    y: "RateProfile | tuple[float, ...]",
    f: str = "square",
    hinge_threshold: float = 0.3,
) -> bool:
    """Does sum f(x_i) >= sum f(y_i) hold for the built-in convex f?

    The precondition is that x majorizes y; for sorted (non-increasing)
    profiles the inequality is then guaranteed for every convex f, and
    this check re-derives that conclusion without any of that theory."""
    if f not in _CONVEX_TEST_FUNCTIONS:
        raise ValueError(f"f must be one of {_CONVEX_TEST_FUNCTIONS}")
    if not majorizes(x, y):
        raise ValueError("precondition violated: x does not majorize y")
    funcs = {
        "square": lambda t: t * t,
        "exp": math.exp,
        "hinge": lambda t: max(0.0, t - hinge_threshold),
    }
    fn = funcs[f]
    xs = x.rates if isinstance(x, RateProfile) else tuple(x)
    ys = y.rates if isinstance(y, RateProfile) else tuple(y)
    return sum(fn(t) for t in xs) >= sum(fn(t) for t in ys) - 1e-12
