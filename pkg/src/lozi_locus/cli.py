"""Command-line interface: ``lozi-locus <subcommand> ...``.

Exit status: 0 on success, 1 when an internal budget is exhausted (or a
required object is not found within it), 2 for usage errors, unparsable
numbers and violated preconditions. Data goes to standard output or files;
diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .core import Params
from .curves import B_IDS, C_IDS, curve_min, curve_residual, scaling_table, trace_Cn, z_orbit_x
from .errors import BudgetError, LoziError, NotFoundError
from .manifolds import ManifoldBudget, b_curve_points, trace_B_curve, trace_stable, trace_unstable, verify_B_tangency
from .region import ClassifierConfig, classify, find_periodic_orbits
from .scan import REGION_ONLY, REGION_PLUS_HOMOCLINIC, ScanSpec, load_config, render, scan, with_budgets, write_csv
from .spiral import solve_t0, solve_t1

__all__ = ["main", "build_parser"]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lozi-locus", description="Zero-entropy locus of the Lozi map.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify one parameter pair")
    c.add_argument("--a", type=float, required=True)
    c.add_argument("--b", type=float, required=True)
    c.add_argument("--max-pairs", type=_positive_int)
    c.add_argument("--config", type=Path, help="key=value file with default budgets")

    s = sub.add_parser("scan", help="rasterise a parameter rectangle to PPM")
    s.add_argument("--a-min", type=float, required=True)
    s.add_argument("--a-max", type=float, required=True)
    s.add_argument("--b-min", type=float, required=True)
    s.add_argument("--b-max", type=float, required=True)
    s.add_argument("--width", type=_positive_int, required=True)
    s.add_argument("--height", type=_positive_int, required=True)
    s.add_argument("--mode", choices=("region", "homoclinic"), default="region")
    s.add_argument("--ct", action="store_true", help="axes are c = 1/a and t = (1 - b)/a")
    s.add_argument("--threads", type=_positive_int)
    s.add_argument("--max-pairs", type=_positive_int)
    s.add_argument("--max-vertices", type=_positive_int)
    s.add_argument("--max-iterations", type=_positive_int)
    s.add_argument("--config", type=Path)
    s.add_argument("--out", type=Path, required=True)
    s.add_argument("--csv", type=Path)
    s.add_argument("--png", type=Path, help="also save a matplotlib rendering")

    sub.add_parser("roots", help="print the spiral constants t0 and t1")

    cv = sub.add_parser("curve", help="trace a boundary curve")
    cv.add_argument("--id", choices=C_IDS + B_IDS, required=True)
    cv.add_argument("--samples", type=_positive_int, required=True)
    cv.add_argument("--out", type=Path, required=True)

    cm = sub.add_parser("curve-min", help="lowest point of C_n")
    cm.add_argument("--n", type=int, required=True)

    sc = sub.add_parser("scaling", help="table of 2k a_2k")
    sc.add_argument("--kmax", type=int, required=True)
    sc.add_argument("--out", type=Path, required=True)
    sc.add_argument("--png", type=Path)

    m = sub.add_parser("manifold", help="trace W^u or W^s of X")
    m.add_argument("--a", type=float, required=True)
    m.add_argument("--b", type=float, required=True)
    m.add_argument("--kind", choices=("stable", "unstable"), required=True)
    m.add_argument("--branch", choices=("plus", "minus", "both"), default="both")
    m.add_argument("--max-vertices", type=_positive_int)
    m.add_argument("--max-iterations", type=_positive_int)
    m.add_argument("--config", type=Path)
    m.add_argument("--out", type=Path, required=True)

    o = sub.add_parser("orbits", help="periodic orbits of a given period")
    o.add_argument("--a", type=float, required=True)
    o.add_argument("--b", type=float, required=True)
    o.add_argument("--period", type=int, required=True)

    t = sub.add_parser("tangency", help="solve a B-curve at height b and check its incidence")
    t.add_argument("--id", choices=B_IDS, required=True)
    t.add_argument("--b", type=float, required=True)
    return p


def _config(args) -> dict[str, int]:
    path = getattr(args, "config", None)
    return load_config(path) if path is not None else {}


def _pick(args, cfg: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return cfg.get(key, default)


def _cmd_classify(args) -> int:
    cfg = _config(args)
    pairs = _pick(args, cfg, "max_pairs", ClassifierConfig().max_pairs)
    rc = classify(Params(args.a, args.b), ClassifierConfig(max_pairs=pairs))
    print(json.dumps({"a": args.a, "b": args.b, **rc.to_dict()}))
    return 0


def _cmd_scan(args) -> int:
    cfg = _config(args)
    spec = ScanSpec(
        a_range=(args.a_min, args.a_max),
        b_range=(args.b_min, args.b_max),
        width=args.width,
        height=args.height,
        mode=REGION_ONLY if args.mode == "region" else REGION_PLUS_HOMOCLINIC,
        coordinate_system="ct" if args.ct else "ab",
    )
    spec = with_budgets(
        spec,
        max_pairs=_pick(args, cfg, "max_pairs", None),
        max_vertices=_pick(args, cfg, "max_vertices", None),
        max_iterations=_pick(args, cfg, "max_iterations", None),
    )
    img = scan(spec, threads=_pick(args, cfg, "threads", 1))
    args.out.write_bytes(render(img))
    if args.csv is not None:
        write_csv(img, args.csv)
    if args.png is not None:
        from .plotting import raster_figure

        raster_figure(img).savefig(args.png, dpi=150)
    return 0


def _cmd_roots(args) -> int:
    r0, r1 = solve_t0(), solve_t1()
    print(f"t0 {r0.value!r} residual {r0.residual:.3e}")
    print(f"t1 {r1.value!r} residual {r1.residual:.3e}")
    return 0


def _cmd_curve(args) -> int:
    cid = args.id
    with open(args.out, "w", encoding="ascii") as fh:
        if cid in C_IDS:
            n = int(cid[1:])
            pts = trace_Cn(n, args.samples)
            fh.write("a,b,x_n,algebraic_residual\n")
            for a, b in pts:
                xn = float(z_orbit_x(a, b, n)[n])
                fh.write(f"{_fmt(a)},{_fmt(b)},{_fmt(xn)},{_fmt(float(curve_residual(cid, a, b)))}\n")
        else:
            pts = trace_B_curve(cid, args.samples)
            fh.write("a,b,algebraic_residual,tangency_residual\n")
            for a, b in pts:
                res = float(curve_residual(cid, a, b))
                fh.write(f"{_fmt(a)},{_fmt(b)},{_fmt(res)},{_fmt(verify_B_tangency(cid, a, b))}\n")
    print(f"{len(pts)} points written to {args.out}", file=sys.stderr)
    return 0


def _cmd_curve_min(args) -> int:
    m = curve_min(args.n)
    print(f"n {m.n} a_n {_fmt(m.a_n)} b_n {_fmt(m.b_n)} t {_fmt(m.t)}")
    return 0


def _cmd_scaling(args) -> int:
    rows = scaling_table(args.kmax)
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write("k,a_2k,two_k_a_2k\n")
        for k, a, v in rows:
            fh.write(f"{k},{_fmt(a)},{_fmt(v)}\n")
    if args.png is not None:
        from .plotting import scaling_figure

        scaling_figure(rows).savefig(args.png, dpi=150)
    return 0


def _cmd_manifold(args) -> int:
    cfg = _config(args)
    default = ManifoldBudget()
    budget = ManifoldBudget(
        max_vertices=_pick(args, cfg, "max_vertices", default.max_vertices),
        max_iterations=_pick(args, cfg, "max_iterations", default.max_iterations),
    )
    trace = trace_unstable if args.kind == "unstable" else trace_stable
    plus, minus = trace(Params(args.a, args.b), budget)
    if args.branch in ("plus", "both"):
        plus.to_csv(args.out)
    if args.branch == "minus":
        minus.to_csv(args.out)
    elif args.branch == "both":
        other = args.out.with_name(f"{args.out.stem}.minus{args.out.suffix or '.csv'}")
        minus.to_csv(other)
        print(f"minus branch written to {other}", file=sys.stderr)
    for name, poly in (("plus", plus), ("minus", minus)):
        if poly.truncated_by:
            print(f"{name} branch: {len(poly)} vertices, stopped by {poly.truncated_by} budget", file=sys.stderr)
    return 0


def _cmd_orbits(args) -> int:
    params = Params(args.a, args.b)
    orbits = find_periodic_orbits(params, args.period)
    for orb in orbits:
        mults = " ".join(f"{z.real:.12g}{z.imag:+.12g}j" for z in orb.multipliers)
        pts = " ".join(f"({_fmt(p.x)},{_fmt(p.y)})" for p in orb.points)
        print(
            f"{orb.sign_sequence} {orb.stability} multipliers {mults} "
            f"residual {orb.residual(params):.3e}{' boundary' if orb.on_boundary else ''} points {pts}"
        )
    print(f"{len(orbits)} orbit(s) of period {args.period}", file=sys.stderr)
    return 0


def _cmd_tangency(args) -> int:
    roots = b_curve_points(args.id, args.b)
    if not roots:
        raise NotFoundError(f"no point of {args.id} at b = {args.b} realises its incidence")
    for a in roots:
        print(f"{args.id} b {_fmt(args.b)} a {_fmt(a)} residual {verify_B_tangency(args.id, a, args.b):.3e}")
    return 0


_COMMANDS = {
    "classify": _cmd_classify,
    "scan": _cmd_scan,
    "roots": _cmd_roots,
    "curve": _cmd_curve,
    "curve-min": _cmd_curve_min,
    "scaling": _cmd_scaling,
    "manifold": _cmd_manifold,
    "orbits": _cmd_orbits,
    "tangency": _cmd_tangency,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (BudgetError, NotFoundError) as exc:
        print(f"lozi-locus: budget exhausted: {exc}", file=sys.stderr)
        return 1
    except (LoziError, ValueError, OSError) as exc:
        print(f"lozi-locus: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
