"""Command-line front end.

Reads a JSON problem file, runs one analysis, and prints machine-readable
JSON.  Exit codes: 0 achievable / success, 1 not achievable, 2 invalid
input.  ``--csv`` writes the standard report table next to any analysis;
``emit-figure`` additionally renders a PNG when asked.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

from .achieve import check_lossless, check_lossy, min_distortion
from .cumfn import (CumulativeFunction, effective_crdf, leakage_offset,
                    require_valid, validate_regular)
from .envelope import concave_envelope
from .oracle import brute_force_min_distortion
from .ratedist import (DistortionSpec, RDCurve, SourceModel, build_rd_curve,
                       closed_form_curve, distortion_at_rate, entropy)
from .report import analysis_table, figure_table, render_png, write_csv
from .schedule import transmission_plan

_TOP_KEYS = {"source", "distortion", "crdf", "cldf", "dbar", "k", "n_points", "grid_step"}


@dataclass
class Problem:
    source: SourceModel | None = None
    distortion: DistortionSpec | None = None
    crdf: CumulativeFunction | None = None
    cldf: CumulativeFunction | None = None
    dbar: float | None = None
    k: int | None = None
    n_points: int | None = None
    grid_step: float | None = None


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise ValueError(f"unknown field(s) in {where}: {sorted(extra)}")


def load_problem(path: str) -> Problem:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("problem file must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "problem file")
    prob = Problem()
    if "source" in raw:
        src = raw["source"]
        _reject_unknown(src, {"pmf"}, "source")
        prob.source = SourceModel(tuple(src["pmf"]))
    if "distortion" in raw:
        spec = raw["distortion"]
        _reject_unknown(spec, {"kind", "values"}, "distortion")
        values = spec.get("values")
        if values is not None:
            values = tuple(tuple(math.inf if v == "inf" else float(v) for v in row)
                           for row in values)
        prob.distortion = DistortionSpec(kind=spec["kind"], matrix=values)
    if "crdf" in raw:
        prob.crdf = CumulativeFunction.from_json_dict(raw["crdf"])
    if "cldf" in raw:
        if raw["cldf"] == "unconstrained":
            prob.cldf = CumulativeFunction.unbounded()
        else:
            prob.cldf = CumulativeFunction.from_json_dict(raw["cldf"])
    for key in ("dbar", "grid_step"):
        if key in raw:
            setattr(prob, key, float(raw[key]))
    for key in ("k", "n_points"):
        if key in raw:
            setattr(prob, key, int(raw[key]))
    return prob


def _need(value, name: str):
    if value is None:
        raise ValueError(f"this command needs the {name!r} field (or flag)")
    return value


def _cldf(prob: Problem) -> CumulativeFunction:
    # leaving the budget out means there is no eavesdropping constraint
    return prob.cldf if prob.cldf is not None else CumulativeFunction.unbounded()


def curve_for(prob: Problem) -> RDCurve:
    spec: DistortionSpec = _need(prob.distortion, "distortion")
    src: SourceModel = _need(prob.source, "source")
    if spec.kind == "erasure":
        return closed_form_curve("erasure", src)
    if spec.kind == "log_loss":
        return closed_form_curve("log_loss", src)
    if spec.kind == "hamming" and len(src) == 2:
        return closed_form_curve("hamming_binary", src)
    return build_rd_curve(src, spec, n_points=prob.n_points or 33)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        if obj == math.inf:
            return "inf"
        if obj == -math.inf:
            return "-inf"
    return obj


def _write_reports(args, prob: Problem, curve: RDCurve | None) -> None:
    if not getattr(args, "csv", None):
        return
    G = _need(prob.crdf, "crdf")
    require_valid(G, name="CRDF")
    L = _cldf(prob)
    geff = effective_crdf(G, L, mode="lossy")
    env = concave_envelope(geff)
    columns, rows = analysis_table(G, L, geff, env, curve)
    write_csv(args.csv, columns, rows)


# ---------------------------------------------------------------------
# command handlers: return (payload, exit_code)


def _cmd_validate(args, prob: Problem):
    out = {}
    ok = True
    if prob.crdf is not None:
        rep = validate_regular(prob.crdf)
        out["crdf"] = {"valid": rep.ok, "violations": list(rep.violations)}
        ok &= rep.ok
    if prob.cldf is not None:
        rep = validate_regular(prob.cldf, allow_infinite=True)
        out["cldf"] = {"valid": rep.ok, "violations": list(rep.violations)}
        ok &= rep.ok
    if not out:
        raise ValueError("nothing to validate: provide crdf and/or cldf")
    if not ok:
        raise _Invalid(out)
    return out, 0


class _Invalid(Exception):
    """Carries a validation payload that must exit with code 2."""

    def __init__(self, payload):
        self.payload = payload


def _cmd_effective(args, prob: Problem):
    G = _need(prob.crdf, "crdf")
    L = _cldf(prob)
    if args.lossless:
        h = entropy(_need(prob.source, "source"))
        geff = effective_crdf(G, L, mode="lossless", entropy_bits=h)
        offset = max(0.0, G.evaluate(1.0) - h)
        payload = {"mode": "lossless", "offset": offset, "effective_crdf": geff.to_json_dict()}
    else:
        geff = effective_crdf(G, L, mode="lossy")
        offset, beta = leakage_offset(G, L)
        payload = {"mode": "lossy", "offset": offset, "offset_alpha": beta,
                   "effective_crdf": geff.to_json_dict()}
    _write_reports(args, prob, None)
    return payload, 0


def _cmd_envelope(args, prob: Problem):
    G = _need(prob.crdf, "crdf")
    geff = effective_crdf(G, _cldf(prob), mode="lossy")
    env = concave_envelope(geff)
    _write_reports(args, prob, None)
    return {"envelope": {"knots": [list(kv) for kv in env.knots]},
            "segments": [list(s) for s in env.segments]}, 0


def _cmd_rd_curve(args, prob: Problem):
    curve = curve_for(prob)
    n = args.n_points or prob.n_points or 33
    if curve.kind == "sampled":
        pts = [list(p) for p in curve.points]
    else:
        top = curve.c if curve.kind == "linear" else entropy(_need(prob.source, "source"))
        pts = [[r, distortion_at_rate(curve, r)]
               for r in (i * top / (n - 1) for i in range(n))]
    return {"kind": curve.kind, "d_max": curve.d_max, "points": pts}, 0


def _cmd_check_lossless(args, prob: Problem):
    verdict = check_lossless(_need(prob.crdf, "crdf"), _cldf(prob), _need(prob.source, "source"))
    _write_reports(args, prob, None)
    return verdict.to_json_dict(), 0 if verdict.achievable else 1


def _cmd_check_lossy(args, prob: Problem):
    G = _need(prob.crdf, "crdf")
    L = _cldf(prob)
    curve = curve_for(prob)
    verdict = check_lossy(G, L, curve, _need(prob.dbar, "dbar"))
    payload = verdict.to_json_dict()
    if args.oracle:
        k = args.k or prob.k or 2
        step = args.grid_step or prob.grid_step or 0.05
        res = brute_force_min_distortion(G, L, curve, k, grid_step=step)
        payload["oracle"] = {
            "min_distortion": res.min_distortion,
            "used": list(res.used),
            "descriptions": list(res.descriptions),
            "grid_step": res.grid_step,
            "k": k,
        }
    _write_reports(args, prob, curve)
    return payload, 0 if verdict.achievable else 1


def _cmd_min_distortion(args, prob: Problem):
    curve = curve_for(prob)
    md = min_distortion(_need(prob.crdf, "crdf"), _cldf(prob), curve)
    _write_reports(args, prob, curve)
    return {"min_distortion": md}, 0


def _cmd_schedule(args, prob: Problem):
    curve = curve_for(prob)
    k = _need(args.k or prob.k, "k")
    plan = transmission_plan(_need(prob.crdf, "crdf"), _cldf(prob), curve, k)
    _write_reports(args, prob, curve)
    return plan.to_json_dict(), 0


def _cmd_oracle(args, prob: Problem):
    curve = curve_for(prob)
    k = _need(args.k or prob.k, "k")
    step = args.grid_step or prob.grid_step or 0.05
    res = brute_force_min_distortion(_need(prob.crdf, "crdf"), _cldf(prob), curve, k,
                                     grid_step=step, exhaustive=args.exhaustive)
    return {"min_distortion": res.min_distortion, "used": list(res.used),
            "descriptions": list(res.descriptions), "grid_step": res.grid_step, "k": k}, 0


def _cmd_emit_figure(args, prob: Problem):
    G = _need(prob.crdf, "crdf")
    require_valid(G, name="CRDF")
    L = _cldf(prob)
    geff = effective_crdf(G, L, mode="lossy")
    env = concave_envelope(geff)
    h = entropy(prob.source) if prob.source is not None else None
    columns, rows = figure_table(args.figure, G, L, geff, env,
                                 dbar=prob.dbar, entropy_bits=h)
    if args.csv:
        write_csv(args.csv, columns, rows)
    if args.png:
        render_png(args.png, columns, rows, title=args.figure)
    return {"figure": args.figure, "columns": columns, "rows": rows}, 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqrate",
        description="Achievability of sequential source-coding rate schedules "
                    "under cumulative leakage constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **extras):
        p = sub.add_parser(name)
        p.add_argument("problem", help="JSON problem file")
        p.set_defaults(handler=handler)
        if extras.get("csv", True):
            p.add_argument("--csv", metavar="PATH", help="write the report table as CSV")
        return p

    add("validate", _cmd_validate, csv=False)
    p = add("effective", _cmd_effective)
    p.add_argument("--lossless", action="store_true",
                   help="clip against the entropy shortfall instead of the leakage budget")
    add("envelope", _cmd_envelope)
    p = add("rd-curve", _cmd_rd_curve, csv=False)
    p.add_argument("--n-points", type=int, default=None)
    add("check-lossless", _cmd_check_lossless)
    p = add("check-lossy", _cmd_check_lossy)
    p.add_argument("--oracle", action="store_true", help="attach the brute-force cross-check")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--grid-step", type=float, default=None)
    add("min-distortion", _cmd_min_distortion)
    p = add("schedule", _cmd_schedule)
    p.add_argument("--k", type=int, default=None)
    p = add("oracle", _cmd_oracle, csv=False)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--grid-step", type=float, default=None)
    p.add_argument("--exhaustive", action="store_true")
    p = sub.add_parser("emit-figure")
    p.add_argument("figure", choices=["theorem2", "example1", "example2"])
    p.add_argument("problem", help="JSON problem file")
    p.add_argument("--csv", metavar="PATH", help="write the figure data as CSV")
    p.add_argument("--png", metavar="PATH", help="render the figure with matplotlib")
    p.set_defaults(handler=_cmd_emit_figure)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        prob = load_problem(args.problem)
        payload, code = args.handler(args, prob)
    except _Invalid as exc:
        print(json.dumps(_jsonable(exc.payload), indent=2))
        print("error: input invalid", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(_jsonable(payload), indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
