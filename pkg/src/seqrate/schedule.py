"""Discrete rate profiles and causal transmission plans.

A profile whose prefix sums dominate another's (with equal totals) can be
realized under the dominated profile's availability by deferring parts of
each block's description to later transmission slots.  ``split_rates``
constructs that deferral explicitly as a lower-triangular matrix, and
``transmission_plan`` composes it with the envelope description rates to
emit a concrete schedule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cumfn import CumulativeFunction, effective_crdf, require_valid
from .envelope import concave_envelope, segment_slopes
from .ratedist import RDCurve, distortion_at_rate

MAJORIZE_TOL = 1e-12


@dataclass(frozen=True)
class RateProfile:
    """Per-block rates, bits per symbol."""

    rates: tuple[float, ...]

    def __post_init__(self):
        r = tuple(float(x) for x in self.rates)
        if len(r) < 1:
            raise ValueError("a rate profile needs at least one block")
        if any(x < -1e-12 for x in r):
            raise ValueError("rates must be >= 0")
        # increments of float-interpolated non-decreasing functions can go
        # negative by an ulp; snap those to zero
        r = tuple(max(0.0, x) for x in r)
        object.__setattr__(self, "rates", r)

    def __len__(self) -> int:
        return len(self.rates)

    def __iter__(self):
        return iter(self.rates)

    def __getitem__(self, i):
        return self.rates[i]

    @property
    def total(self) -> float:
        return sum(self.rates)

    def prefix_sums(self) -> tuple[float, ...]:
        out, acc = [], 0.0
        for r in self.rates:
            acc += r
            out.append(acc)
        return tuple(out)


def _as_profile(x: "RateProfile | Sequence[float]") -> RateProfile:
    return x if isinstance(x, RateProfile) else RateProfile(tuple(x))


def rate_profile(G: CumulativeFunction, k: int) -> RateProfile:
    """Increments of G on the grid: rate becoming available in each block."""
    require_valid(G)
    if k < 1:
        raise ValueError("block count k must be >= 1")
    vals = [G.evaluate(j / k) for j in range(k + 1)]
    return RateProfile(tuple(b - a for a, b in zip(vals, vals[1:])))


def majorizes(x: "RateProfile | Sequence[float]", y: "RateProfile | Sequence[float]",
              tol: float = MAJORIZE_TOL) -> bool:
    """Prefix sums of x dominate those of y, with equal totals."""
    xp, yp = _as_profile(x), _as_profile(y)
    if len(xp) != len(yp):
        raise ValueError("profiles must have equal length")
    sx, sy = xp.prefix_sums(), yp.prefix_sums()
    if abs(sx[-1] - sy[-1]) > tol:
        return False
    return all(a >= b - tol for a, b in zip(sx, sy))


@dataclass(frozen=True)
class RateSplitMatrix:
    """Lower-triangular deferral: ``rows[i][j]`` is the rate spent at time i
    on the description of block j (0-based, j <= i)."""

    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        for i, row in enumerate(self.rows):
            if len(row) != i + 1:
                raise ValueError("row i must have exactly i+1 entries")
        object.__setattr__(self, "rows", tuple(tuple(float(v) for v in row) for row in self.rows))

    @property
    def k(self) -> int:
        return len(self.rows)

    def block_totals(self) -> tuple[float, ...]:
        """Column sums: total description rate each block ends up with."""
        return tuple(sum(self.rows[i][j] for i in range(j, self.k)) for j in range(self.k))

    def time_totals(self) -> tuple[float, ...]:
        """Row sums: rate transmitted in each time slot."""
        return tuple(sum(row) for row in self.rows)


def split_rates(r1: "RateProfile | Sequence[float]",
                r2: "RateProfile | Sequence[float]") -> RateSplitMatrix:
    """Split the description profile r1 across the transmission profile r2.

    Requires r1 to majorize r2.  Column j sums to r1[j] and row i sums to
    r2[i], all entries nonnegative.  The construction folds block by
    block: the part of the running description budget that cannot be sent
    now is merged with the next block's budget, and later transmissions
    repay the merged pool in proportion to what each block contributed.
    The output is deterministic; a vanishing pool contributes zero shares.
    """
    d, t = _as_profile(r1), _as_profile(r2)
    if len(d) != len(t):
        raise ValueError("profiles must have equal length")
    if not majorizes(d, t):
        raise ValueError("description profile must majorize the transmission profile")
    k = len(d)
    rows = [[0.0] * (i + 1) for i in range(k)]
    weights = [0.0] * k  # how the merged pool decomposes over original blocks
    weights[0] = 1.0
    pool = d[0]
    for i in range(k):
        take = pool if i == k - 1 else min(t[i], pool)
        for j in range(i + 1):
            if weights[j]:
                rows[i][j] = take * weights[j]
        if i == k - 1:
            break
        leftover = max(0.0, pool - take)
        pool = d[i + 1] + leftover
        if pool > 0.0:
            new = [leftover * weights[j] / pool for j in range(i + 1)]
            new.append(d[i + 1] / pool)
            for j in range(i + 1):
                weights[j] = new[j]
            weights[i + 1] = new[i + 1]
        else:
            for j in range(i + 2):
                weights[j] = 0.0
    return RateSplitMatrix(tuple(tuple(row) for row in rows))


@dataclass(frozen=True)
class TransmissionPlan:
    """Concrete causal schedule realizing the optimal description rates."""

    k: int
    description_rates: tuple[float, ...]
    transmit_rates: tuple[float, ...]
    split: RateSplitMatrix
    block_distortions: tuple[float, ...]
    predicted_avg_distortion: float

    def to_json_dict(self) -> dict:
        blocks = []
        for i in range(self.k):
            sent = [{"desc_block": j + 1, "rate": self.split.rows[i][j]}
                    for j in range(i + 1) if self.split.rows[i][j] > 0.0]
            blocks.append({"time": i + 1, "total": self.transmit_rates[i], "sent": sent})
        descriptions = [
            {"block": j + 1, "rate": self.description_rates[j],
             "predicted_distortion": self.block_distortions[j]}
            for j in range(self.k)
        ]
        return {
            "k": self.k,
            "blocks": blocks,
            "descriptions": descriptions,
            "predicted_avg_distortion": self.predicted_avg_distortion,
        }


def transmission_plan(
    G: CumulativeFunction,
    L: CumulativeFunction,
    curve: RDCurve,
    k: int,
) -> TransmissionPlan:
    """Schedule realizing the least average distortion with k blocks.

    Description rates are the envelope increments of the effective
    schedule; they majorize the effective schedule's own increments, so
    the split always exists.  Each block's predicted distortion averages
    D over the envelope slope across the block (exactly, by splitting at
    envelope kinks), so the plan's average equals the instance's least
    distortion even when kinks fall inside blocks.
    """
    if k < 1:
        raise ValueError("block count k must be >= 1")
    geff = effective_crdf(G, L, mode="lossy")
    env = concave_envelope(geff)
    desc = RateProfile(segment_slopes(env, k))
    avail = rate_profile(geff, k)
    split = split_rates(desc, avail)

    block_d = []
    for j in range(k):
        lo, hi = j / k, (j + 1) / k
        cuts = sorted({lo, hi} | {a for a in env.alphas if lo < a < hi})
        acc = 0.0
        for a, b in zip(cuts, cuts[1:]):
            acc += (b - a) * distortion_at_rate(curve, env.slope(b, side="left"))
        block_d.append(acc * k)

    return TransmissionPlan(
        k=k,
        description_rates=desc.rates,
        transmit_rates=avail.rates,
        split=split,
        block_distortions=tuple(block_d),
        predicted_avg_distortion=sum(block_d) / k,
    )
