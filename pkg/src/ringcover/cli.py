"""Command-line entry point.

Exit status: 0 on success (or a certified result), 1 when a check fails or a
budget runs out, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path


from .errors import (
    BudgetExceeded,
    CalibrationError,
    CertificationError,
    ConfigurationError,
    ConstantsInfeasible,
    InvalidArgument,
    InvariantViolation,
)

OK, FAILED, USAGE = 0, 1, 2


def _json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _positive(kind):
    def parse(s):
        v = kind(s)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {s}")
        return v

    return parse


# -- ellipse packings -----------------------------------------------------------

def cmd_pack(args) -> int:
    from .packer import PackingConfig, build_cell

    cfg = PackingConfig(args.lam, n_override=args.n, delta_policy=args.policy, delta=args.delta,
                        max_tiles=args.max_tiles)
    packing = build_cell(cfg, time_budget=args.time_budget)
    if args.out:
        packing.save(args.out)
    print(_json(packing.summary()))
    if args.svg:
        from .packer import half_turn, upward_triangle
        from .plotting import render_packing

        up = upward_triangle().vertices
        render_packing(packing.centers, packing.linears, args.svg, packing.lam, args.enlarged,
                       triangles=[up, half_turn()(up)])
    return OK


def cmd_verify(args) -> int:
    from .packer import PeriodicPacking
    from .verify import cell_region, verify_covering, verify_packing

    packing = PeriodicPacking.load(args.packing)
    centers, linears, _ = packing.translates(1)
    check = verify_packing((centers, linears), tol=args.tol)
    cover = verify_covering((centers, linears), packing.lam, cell_region(packing.lattice), args.min_cell)
    result = {
        "packing": args.packing,
        "lambda": packing.lam,
        "ellipses": len(packing),
        "disjoint": check.ok,
        "offending_pairs": len(check.offending),
        "tangent_pairs": check.tangent_pairs,
        "covering_certified": cover.certified,
        "uncovered_cells": len(cover.uncovered_cells),
        "needs_refinement": len(cover.needs_refinement),
        "min_cell": args.min_cell,
    }
    print(_json(result))
    if args.report:
        out = Path(args.report)
        out.mkdir(parents=True, exist_ok=True)
        cover.save_json(out / "coverage.json")
        cover.save_csv(out / "coverage.csv")
        (out / "verify.json").write_text(_json({**result, "offending": check.offending[:1000]}) + "\n")
        from .plotting import render_packing

        render_packing(centers, linears, out / "cell.svg", packing.lam, enlarged=len(centers) <= 5000,
                       region=cell_region(packing.lattice))
    return OK if check.ok and cover.certified else FAILED


def cmd_render(args) -> int:
    from .packer import PeriodicPacking
    from .plotting import render_packing
    from .verify import cell_region

    packing = PeriodicPacking.load(args.packing)
    if args.neighbours:
        centers, linears, _ = packing.translates(1)
        region = cell_region(packing.lattice)
    else:
        centers, linears, region = packing.centers, packing.linears, None
    count = render_packing(centers, linears, args.out, packing.lam, args.enlarged, region=region)
    print(_json({"out": args.out, "elements": count}))
    return OK


def cmd_trend(args) -> int:
    """Count and width of cells across lambda; cells over budget are estimated only."""
    import time

    from .packer import PackingConfig, build_cell, estimate_tiles

    rows = []
    for lam in args.lambdas:
        cfg = PackingConfig(lam, delta_policy=args.policy)
        est = estimate_tiles(cfg)
        row = {"lambda": lam, "n": cfg.n, "policy": args.policy, "status": "built", "count": None,
               "min_width": None, "max_diameter": None,
               "estimated_count": None if est is None else 2 * est}
        if est is not None and 2 * est > args.max_tiles:
            row["status"] = "skipped: estimate above --max-tiles"
        else:
            start = time.perf_counter()
            try:
                s = build_cell(PackingConfig(lam, delta_policy=args.policy, max_tiles=args.max_tiles),
                               time_budget=args.time_budget).summary()
                row.update(count=s["ellipse_count"], min_width=s["min_width"], max_diameter=s["max_diameter"])
            except BudgetExceeded as exc:
                row["status"] = f"budget exceeded after {exc.tiles_placed} tiles"
            row["seconds"] = round(time.perf_counter() - start, 2)
        rows.append(row)
    built = [r for r in rows if r["count"] is not None]
    counts = [r["count"] for r in built]
    widths = [r["min_width"] for r in built]
    monotone = all(a < b for a, b in zip(counts, counts[1:])) and all(a > b for a, b in zip(widths, widths[1:]))
    print(_json({"rows": rows, "monotone_over_built": monotone}))
    if args.csv:
        keys = ["lambda", "n", "policy", "status", "count", "estimated_count", "min_width", "max_diameter"]
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, keys, extrasaction="ignore")
            w.writeheader()
            w.writerows(rows)
    if args.svg:
        from .plotting import render_trend

        render_trend(rows, args.svg)
    return OK


# -- disc packings --------------------------------------------------------------

def _constants(args):
    from .discbound.constants import Constants

    over = {}
    for key in ("eps", "alpha", "beta"):
        v = getattr(args, key, None)
        if v is not None:
            over[key] = v
    return Constants.derived_defaults(**over)


def cmd_disc_audit(args) -> int:
    from .discbound.constants import audit_constants, derive_window_constants

    c = _constants(args)
    note = ""
    try:
        c = derive_window_constants(c)
    except ConstantsInfeasible as exc:
        note = str(exc)
    report = audit_constants(c)
    for line in report.lines():
        print(line)
    if note:
        print(f"note: {note}")
    print("audit:", "PASS" if report.passed else "FAIL (" + ", ".join(report.failed()) + ")")
    if args.json:
        Path(args.json).write_text(_json(report.to_dict()) + "\n")
    return OK if report.passed else FAILED


def cmd_disc_calibrate(args) -> int:
    from .discbound.constants import calibrate

    c = calibrate(_constants(args))
    _emit(_json(c.to_dict()), args.out)
    return OK


def cmd_disc_random(args) -> int:
    from .discbound.generators import random_greedy_packing

    lo, hi = args.radii
    region = tuple(args.region) if args.region else (-3.0, -3.0, 3.0, 3.0)
    p = random_greedy_packing(args.seed, region=region, radius_range=(lo, hi), eps=args.eps,
                              max_failures=args.max_failures)
    p.save(args.out)
    print(_json({"out": args.out, "discs": len(p), "density": round(p.density(region), 4)}))
    return OK


def cmd_disc_chase(args) -> int:
    from .discbound.chase import chase
    from .discbound.constants import calibrate
    from .discbound.generators import DiscPacking
    from .discbound.regions import Square

    packing = DiscPacking.load(args.packing)
    if args.eps is not None:
        packing = DiscPacking(packing.centers, packing.radii, args.eps)
    consts = calibrate(_constants(argparse.Namespace(eps=packing.eps, alpha=args.alpha, beta=args.beta)),
                       with_eps_max=False)
    square = Square(tuple(args.center), 4.0 * args.scale)
    try:
        point, trace = chase(packing, square, consts)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return FAILED
    doc = {"point": [float(v) for v in point], "steps": len(trace.steps), "labels": trace.case_labels,
           "nested_and_shrinking": trace.shrinks(), "trace": trace.to_dict()}
    if args.out:
        Path(args.out).write_text(_json(doc) + "\n")
    print(_json({k: doc[k] for k in ("point", "steps", "labels", "nested_and_shrinking")}))
    if args.svg:
        from .plotting import render_chase

        render_chase(packing, trace, args.svg)
    return OK


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ringcover", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("pack", help="build a fundamental cell")
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--n", type=int, default=None, help="half the number of polygon sides")
    s.add_argument("--policy", choices=("auto", "fixed", "cover"), default="auto")
    s.add_argument("--delta", type=_positive(float), default=None, help="strip height for --policy fixed")
    s.add_argument("--max-tiles", type=_positive(int), default=None)
    s.add_argument("--time-budget", type=_positive(float), default=None, help="seconds")
    s.add_argument("--out", help="packing file (JSON)")
    s.add_argument("--svg", help="also draw the cell")
    s.add_argument("--enlarged", action="store_true", help="draw enlargements in --svg")
    s.set_defaults(func=cmd_pack)

    s = sub.add_parser("verify", help="check disjointness and covering of a packing file")
    s.add_argument("--packing", required=True)
    s.add_argument("--min-cell", type=_positive(float), default=1e-3)
    s.add_argument("--tol", type=_positive(float), default=1e-9)
    s.add_argument("--report", help="directory for JSON, CSV and SVG output")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("render", help="draw a packing file as SVG")
    s.add_argument("--packing", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--enlarged", action="store_true")
    s.add_argument("--neighbours", action="store_true", help="include the 8 neighbouring cells")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("trend", help="ellipse count and minimum width across lambda")
    s.add_argument("--lambdas", type=float, nargs="+", default=[1.5, 1.2, 1.1])
    s.add_argument("--policy", choices=("auto", "cover"), default="auto")
    s.add_argument("--max-tiles", type=_positive(int), default=5_000_000)
    s.add_argument("--time-budget", type=_positive(float), default=120.0)
    s.add_argument("--csv")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_trend)

    def disc_constants(s):
        s.add_argument("--eps", type=_positive(float), default=None)
        s.add_argument("--alpha", type=_positive(float), default=None)
        s.add_argument("--beta", type=_positive(float), default=None)

    s = sub.add_parser("disc-audit", help="evaluate the inequality chain for the disc constants")
    disc_constants(s)
    s.add_argument("--json")
    s.set_defaults(func=cmd_disc_audit)

    s = sub.add_parser("disc-calibrate", help="derive window constants and the largest feasible eps")
    disc_constants(s)
    s.add_argument("--out")
    s.set_defaults(func=cmd_disc_calibrate)

    s = sub.add_parser("disc-random", help="seeded random greedy disc packing")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--radii", type=_positive(float), nargs=2, default=(0.05, 1.0), metavar=("MIN", "MAX"))
    s.add_argument("--region", type=float, nargs=4, metavar=("X0", "Y0", "X1", "Y1"))
    s.add_argument("--eps", type=_positive(float), default=1e-5)
    s.add_argument("--max-failures", type=_positive(int), default=1000)
    s.set_defaults(func=cmd_disc_random)

    s = sub.add_parser("disc-chase", help="find a point no enlarged disc covers")
    s.add_argument("--packing", required=True)
    s.add_argument("--eps", type=_positive(float), default=None, help="override the file's eps")
    s.add_argument("--alpha", type=_positive(float), default=None)
    s.add_argument("--beta", type=_positive(float), default=None)
    s.add_argument("--center", type=float, nargs=2, default=(0.0, 0.0))
    s.add_argument("--scale", type=_positive(float), default=1.0, help="square side is 4 * scale")
    s.add_argument("--out", help="trace file (JSON)")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_disc_chase)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else OK
    try:
        return args.func(args)
    except (InvalidArgument, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (BudgetExceeded, CalibrationError, CertificationError, ConstantsInfeasible) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return FAILED
    except (FileNotFoundError, IsADirectoryError, PermissionError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
