"""Tabular and graphical output for the CLI's report path.

Tables are emitted on a uniform alpha grid augmented with every knot of
the functions involved, so plotted curves are exact (piecewise-linear
between emitted rows).  CSV cells use repr round-tripping; the optional
PNG rendering draws the same columns with matplotlib.
"""

from __future__ import annotations

import math

from .cumfn import CumulativeFunction
from .envelope import ConcaveEnvelope
from .ratedist import RDCurve, distortion_at_rate

GRID_STEP = 0.01


def grid_alphas(*fns: CumulativeFunction | ConcaveEnvelope | None, step: float = GRID_STEP) -> list[float]:
    n = round(1.0 / step)
    alphas = {i / n for i in range(n + 1)}
    for f in fns:
        if f is not None:
            alphas.update(f.alphas)
    return sorted(alphas)


def analysis_table(
    G: CumulativeFunction,
    L: CumulativeFunction,
    geff: CumulativeFunction,
    env: ConcaveEnvelope,
    curve: RDCurve | None,
) -> tuple[list[str], list[list]]:
    """The standard report: schedule, budget, effective schedule, envelope,
    envelope slope, and the distortion the slope buys (when a curve is at
    hand)."""
    columns = ["alpha", "G", "L", "G_eff", "envelope", "slope", "D_of_slope"]
    rows = []
    for alpha in grid_alphas(G, L, geff, env):
        side = "left" if alpha == 1.0 else "right"
        slope = env.slope(alpha, side=side)
        d = distortion_at_rate(curve, slope) if curve is not None else ""
        rows.append([alpha, G.evaluate(alpha), L.evaluate(alpha),
                     geff.evaluate(alpha), env.value(alpha), slope, d])
    return columns, rows


def figure_table(
    name: str,
    G: CumulativeFunction,
    L: CumulativeFunction,
    geff: CumulativeFunction,
    env: ConcaveEnvelope,
    dbar: float | None = None,
    entropy_bits: float | None = None,
) -> tuple[list[str], list[list]]:
    """Data behind the paper-style illustrations.

    ``theorem2``: the schedule, budget, effective schedule and envelope.
    ``example1``/``example2``: the effective schedule against the linear
    achievability ceiling min(c * alpha + Geff(1) - c + dbar, Geff(1)),
    with c = 1 (erasure) or c = H (log-loss).
    """
    if name == "theorem2":
        columns = ["alpha", "G", "L", "G_eff", "envelope"]
        rows = [[a, G.evaluate(a), L.evaluate(a), geff.evaluate(a), env.value(a)]
                for a in grid_alphas(G, L, geff, env)]
        return columns, rows
    if name in ("example1", "example2"):
        if dbar is None:
            raise ValueError(f"figure {name!r} needs a distortion target dbar")
        c = 1.0 if name == "example1" else entropy_bits
        if c is None:
            raise ValueError("figure 'example2' needs the source entropy")
        g1 = geff.evaluate(1.0)
        columns = ["alpha", "G", "L", "G_eff", "upper_bound"]
        rows = []
        for a in grid_alphas(G, L, geff):
            bound = min(c * a + g1 - c + dbar, g1)
            rows.append([a, G.evaluate(a), L.evaluate(a), geff.evaluate(a), bound])
        return columns, rows
    raise ValueError(f"unknown figure {name!r}; pick theorem2, example1 or example2")


def _cell(v) -> str:
    if isinstance(v, float):
        if v == math.inf:
            return "inf"
        return repr(v)
    return str(v)


def write_csv(path: str, columns: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def render_png(path: str, columns: list[str], rows: list[list], title: str = "") -> None:
    """Draw every finite column against alpha and save the figure."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    alphas = [row[0] for row in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    styles = ["-", "--", "-.", ":", "-", "--"]
    for idx, col in enumerate(columns[1:], start=1):
        ys = [row[idx] for row in rows]
        pairs = [(a, y) for a, y in zip(alphas, ys)
                 if isinstance(y, float) and math.isfinite(y)]
        if not pairs:
            continue
        ax.plot([p[0] for p in pairs], [p[1] for p in pairs],
                styles[(idx - 1) % len(styles)], label=col, linewidth=1.4)
    ax.set_xlabel("normalized time alpha")
    ax.set_ylabel("bits per symbol")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=9)
    ax.set_xlim(0.0, 1.0)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
