"""Achievability verdicts for rate schedules under leakage budgets.

Lossless: a schedule works iff the rate still to come always covers both
the entropy of the remaining blocks and the entropy shortfall the leakage
budget imposes on the blocks already seen.  Lossy: the least average
distortion is the distortion-rate function integrated over the slopes of
the concave envelope of the effective schedule; a schedule meets a target
iff that integral does.  Both reduce to exact finite evaluations at knots
because everything in sight is piecewise-linear.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cumfn import CumulativeFunction, effective_crdf, leakage_offset, require_valid
from .envelope import ConcaveEnvelope, concave_envelope
from .ratedist import RDCurve, SourceModel, distortion_at_rate, entropy

VERDICT_TOL = 1e-9


@dataclass(frozen=True)
class Verdict:
    achievable: bool
    margin: float
    binding_alpha: float
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "achievable": self.achievable,
            "margin": self.margin,
            "binding_alpha": self.binding_alpha,
            "details": self.details,
        }


def _knot_sides(*fns: CumulativeFunction):
    """Every (alpha, side) where a piecewise-linear expression in the given
    functions can attain an extremum."""
    alphas = sorted(set().union(*(f.alphas for f in fns)))
    for alpha in alphas:
        if alpha == alphas[0]:
            yield alpha, "right"
        else:
            yield alpha, "left"
            yield alpha, "right"


def check_lossless(G: CumulativeFunction, L: CumulativeFunction, source: SourceModel) -> Verdict:
    """Can the schedule losslessly convey the source within the leakage budget?

    Requires, at every alpha, G(1) - G(alpha) >= max((1 - alpha) H, H - L(alpha)),
    which also forces L(1) >= H.  The slack is evaluated at every knot of G
    and L on both jump sides, which is exact for piecewise-linear inputs.
    """
    require_valid(G, name="CRDF")
    require_valid(L, allow_infinite=True, name="CLDF")
    h = entropy(source)
    g1 = G.evaluate(1.0)
    margin, binding = float("inf"), 0.0
    for alpha, side in _knot_sides(G, L):
        g = G.evaluate(alpha, side)
        lk = L.evaluate(alpha, side)
        slack = (g1 - g) - max((1.0 - alpha) * h, h - lk)
        if slack < margin:
            margin, binding = slack, alpha
    return Verdict(
        achievable=margin >= -VERDICT_TOL,
        margin=margin,
        binding_alpha=binding,
        details={"entropy": h, "final_rate": g1, "final_leakage_budget": L.evaluate(1.0)},
    )


def min_distortion(
    G: CumulativeFunction,
    L: CumulativeFunction,
    curve: RDCurve,
    _envelope_out: list | None = None,
) -> float:
    """Least attainable average distortion for the instance.

    Clips the schedule down to its effective part, takes the concave
    envelope, and sums width * D(slope) over the envelope's segments; the
    integral is exact because the envelope is piecewise-linear.
    """
    geff = effective_crdf(G, L, mode="lossy")
    env = concave_envelope(geff)
    if _envelope_out is not None:
        _envelope_out.append((geff, env))
    return sum((hi - lo) * distortion_at_rate(curve, s) for lo, hi, s in env.segments)


def check_lossy(
    G: CumulativeFunction,
    L: CumulativeFunction,
    curve: RDCurve,
    dbar: float,
) -> Verdict:
    """Is the target average distortion ``dbar`` attainable under the budget?"""
    if dbar < 0.0:
        raise ValueError("distortion target must be >= 0")
    captured: list = []
    md = min_distortion(G, L, curve, _envelope_out=captured)
    (geff, env) = captured[0]
    offset, offset_alpha = leakage_offset(G, L)
    details = {
        "min_distortion": md,
        "withheld_offset": offset,
        "offset_alpha": offset_alpha,
        "envelope_knots": list(env.knots),
    }
    if curve.kind == "sampled":
        # chords of a convex table sit above the true curve, so md is an
        # upper bound and a positive verdict is safe; near the boundary the
        # verdict may be conservative.
        details["curve_interpolation"] = "chord-upper-bound"
    margin = dbar - md
    return Verdict(
        achievable=margin >= -VERDICT_TOL,
        margin=margin,
        binding_alpha=offset_alpha,
        details=details,
    )


def check_linear_rd(
    G: CumulativeFunction,
    L: CumulativeFunction,
    c: float,
    dbar: float,
) -> Verdict:
    """Fast path for linear curves R(D) = c - D.

    Here the envelope never has to be built: the schedule meets ``dbar``
    iff Geff(1) - Geff(alpha) >= (1 - alpha) c - dbar on [0, 1 - dbar/c].
    The slack is evaluated on all of [0, 1] (it is automatically >= 0 past
    1 - dbar/c), which makes the reported margin coincide exactly with
    ``dbar`` minus the envelope integral of the general check.
    """
    if not c > 0.0:
        raise ValueError("linear curve needs c > 0")
    if dbar < 0.0:
        raise ValueError("distortion target must be >= 0")
    geff = effective_crdf(G, L, mode="lossy")
    g1 = geff.evaluate(1.0)
    margin, binding = float("inf"), 0.0
    for alpha, side in _knot_sides(geff):
        slack = g1 - geff.evaluate(alpha, side) + dbar - (1.0 - alpha) * c
        if slack < margin:
            margin, binding = slack, alpha
    return Verdict(
        achievable=margin >= -VERDICT_TOL,
        margin=margin,
        binding_alpha=binding,
        details={"c": c, "check_interval_end": max(0.0, 1.0 - dbar / c)},
    )


def hamming_consistency(G: CumulativeFunction, L: CumulativeFunction, source: SourceModel) -> bool:
    """Cross-validation predicate: the lossless verdict must coincide with
    the zero-distortion Hamming reading of the effective schedule,
    Geff(1) - (1 - alpha) H >= Geff(alpha) for all alpha.  Always true if
    both checks are implemented correctly."""
    lossless = check_lossless(G, L, source).achievable
    h = entropy(source)
    geff = effective_crdf(G, L, mode="lossy")
    g1 = geff.evaluate(1.0)
    margin = min(g1 - (1.0 - alpha) * h - geff.evaluate(alpha, side)
                 for alpha, side in _knot_sides(geff))
    return lossless == (margin >= -VERDICT_TOL)
