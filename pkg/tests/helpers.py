"""Shared generators and small utilities for the test suite.

All randomness goes through explicit ``random.Random`` instances so every
property run is reproducible from its seed.
"""

from __future__ import annotations

import math
import random

from seqrate import CumulativeFunction, SourceModel
from seqrate.cumfn import Knot


def random_crdf(rng: random.Random, max_interior: int = 3, max_total: float = 2.0,
                jump_prob: float = 0.4) -> CumulativeFunction:
    """Random valid piecewise-linear rate schedule with optional jumps."""
    n = rng.randint(0, max_interior)
    cuts = sorted(rng.uniform(0.05, 0.95) for _ in range(n))
    alphas = [0.0]
    for a in cuts:
        if a - alphas[-1] > 1e-3:  # keep breakpoints well separated
            alphas.append(a)
    alphas.append(1.0)
    knots = [Knot(0.0, 0.0, 0.0)]
    value = 0.0
    budget = max_total
    for a in alphas[1:]:
        pre = value + rng.uniform(0.0, budget / len(alphas))
        post = pre + (rng.uniform(0.0, budget / len(alphas)) if rng.random() < jump_prob else 0.0)
        knots.append(Knot(a, pre, post))
        value = post
    return CumulativeFunction(tuple(knots))


def random_cldf(rng: random.Random, max_interior: int = 3, max_total: float = 2.0,
                inf_tail_prob: float = 0.15) -> CumulativeFunction:
    """Random valid leakage budget; sometimes unconstrained from some point on."""
    f = random_crdf(rng, max_interior=max_interior, max_total=max_total)
    if rng.random() < inf_tail_prob:
        ks = list(f.knots)
        cut = rng.randrange(1, len(ks) + 1)
        if cut == len(ks):
            ks[-1] = Knot(1.0, ks[-1].pre, math.inf)
        else:
            ks = ks[:cut]
            ks[cut - 1] = Knot(ks[cut - 1].alpha, ks[cut - 1].pre, math.inf)
            if ks[-1].alpha != 1.0:
                ks.append(Knot(1.0, math.inf, math.inf))
    else:
        ks = f.knots
    return CumulativeFunction(tuple(ks))


def random_source(rng: random.Random, max_size: int = 5, min_size: int = 2) -> SourceModel:
    n = rng.randint(min_size, max_size)
    weights = [rng.uniform(0.05, 1.0) for _ in range(n)]
    total = sum(weights)
    pmf = [w / total for w in weights]
    pmf[-1] = 1.0 - sum(pmf[:-1])  # make the sum exactly 1
    return SourceModel(tuple(pmf))


def random_grid_step_fn(rng: random.Random, k: int, max_total: float = 1.2,
                        quantum: float | None = 0.05) -> CumulativeFunction:
    """Step function jumping only at multiples of 1/k (grid-aligned instances)."""
    vals = sorted(rng.uniform(0.0, max_total) for _ in range(k))
    if quantum is not None:
        vals = [round(v / quantum) * quantum for v in vals]
    knots = [Knot(0.0, 0.0, 0.0)]
    prev = 0.0
    for j, v in enumerate(vals, start=1):
        v = max(prev, v)
        knots.append(Knot(j / k, prev, v))
        prev = v
    return CumulativeFunction(tuple(knots))


def pointwise_sum(F: CumulativeFunction, G: CumulativeFunction) -> CumulativeFunction:
    """Knot-exact sum of two cumulative functions (test-side utility)."""
    alphas = sorted(set(F.alphas) | set(G.alphas))
    knots = []
    for a in alphas:
        post = F.evaluate(a, "right") + G.evaluate(a, "right")
        pre = post if a == 0.0 else F.evaluate(a, "left") + G.evaluate(a, "left")
        knots.append(Knot(a, pre, post))
    return CumulativeFunction(tuple(knots))


def random_nonincreasing(rng: random.Random, k: int, scale: float = 1.0) -> tuple[float, ...]:
    vals = sorted((rng.uniform(0.0, scale) for _ in range(k)), reverse=True)
    return tuple(vals)


def random_sorted_majorizing_pair(rng: random.Random, k: int, scale: float = 1.0):
    """Two non-increasing profiles where the first majorizes the second.

    The second is obtained by averaging the first over a random partition
    into consecutive blocks, which preserves the total, keeps the sequence
    non-increasing, and can only pull prefix sums down.
    """
    x = list(random_nonincreasing(rng, k, scale))
    y: list[float] = []
    i = 0
    while i < k:
        j = rng.randint(i + 1, k)
        block = x[i:j]
        avg = sum(block) / len(block)
        y.extend([avg] * len(block))
        i = j
    return tuple(x), tuple(y)


def random_majorizing_pair(rng: random.Random, k: int, scale: float = 1.0):
    """An arbitrary-order majorizing pair: start equal, then repeatedly move
    mass in the dominant profile toward earlier indices."""
    y = tuple(rng.uniform(0.0, scale) for _ in range(k))
    x = list(y)
    for _ in range(rng.randint(1, k)):
        b = rng.randrange(1, k) if k > 1 else 0
        a = rng.randrange(0, b) if b > 0 else 0
        if b == 0:
            continue
        m = rng.uniform(0.0, x[b])
        x[b] -= m
        x[a] += m
    return tuple(x), y
