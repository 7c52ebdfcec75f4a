"""Batch command line: validate necklaces, enumerate stages, emit clouds,
templates, coordinate tables, homogeneity reports, and fiber counts.

Everything is seedless and deterministic: identical configs produce
byte-identical output files regardless of PEARL_THREADS.
Errors surface as machine-readable JSON on stdout with a nonzero exit.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import formats
from .coding import cyclic_order, necklace_coordinate, point_of
from .errors import ConfigError, PearlError
from .fibration import fiber_stats
from .geom import Sphere, tangency, vec
from .homogeneity import lambda_homeo, verify_homeo
from .necklace import (
    Necklace,
    PolygonalKnot,
    necklace_from_polygon,
    torus_knot_polyline,
    unknot_necklace,
    validate,
)
from .orbit import (
    DEFAULT_BUDGET,
    enumerate_pruned,
    hausdorff,
    max_radius,
    nesting_check,
    parity_counts,
    stage,
)

HOMOG_SAMPLES = 200


@dataclass
class RunConfig:
    """One necklace spec plus numeric knobs, read from a JSON document."""

    kind: str  # "circle" | "spheres" | "polygon"
    payload: dict
    tolerance: float = 1e-9
    epsilon: float = 1e-2
    max_depth: int = 40
    budget: int = DEFAULT_BUDGET
    out: Optional[str] = None


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    variants = [k for k in ("circle", "spheres", "polygon") if k in doc]
    if len(variants) != 1:
        raise ConfigError(
            "config must contain exactly one of 'circle', 'spheres', 'polygon'"
        )
    kind = variants[0]
    cfg = RunConfig(kind=kind, payload=doc[kind])
    for name in ("tolerance", "epsilon"):
        if name in doc:
            val = float(doc[name])
            if val <= 0:
                raise ConfigError(f"{name} must be positive")
            setattr(cfg, name, val)
    if "max_depth" in doc:
        cfg.max_depth = int(doc["max_depth"])
    if "budget" in doc:
        cfg.budget = int(doc["budget"])
    if "out" in doc:
        cfg.out = str(doc["out"])
    return cfg


def build_necklace(cfg: RunConfig) -> Necklace:
    tol = cfg.tolerance
    if cfg.kind == "circle":
        try:
            return unknot_necklace(int(cfg.payload["n"]), float(cfg.payload.get("R", 1.0)), tol)
        except KeyError as exc:
            raise ConfigError(f"circle spec needs 'n': missing {exc}") from exc
    if cfg.kind == "spheres":
        try:
            pearls = [Sphere(vec(*s["c"]), float(s["r"])) for s in cfg.payload]
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"spheres spec needs [{{'c': [x,y,z], 'r': r}}, ...]: {exc}") from exc
        return validate(pearls, tol)
    if "vertices" in cfg.payload:
        return necklace_from_polygon(PolygonalKnot(np.asarray(cfg.payload["vertices"], dtype=float)), tol)
    if "torus_knot" in cfg.payload:
        tk = cfg.payload["torus_knot"]
        try:
            poly = torus_knot_polyline(
                int(tk["p"]),
                int(tk["q"]),
                float(tk["major"]),
                float(tk["minor"]),
                int(tk["samples"]),
                phase=float(tk.get("phase", 0.0)),
                tol=tol,
            )
        except KeyError as exc:
            raise ConfigError(f"torus_knot spec missing {exc}") from exc
        return necklace_from_polygon(poly, tol)
    raise ConfigError("polygon spec needs 'vertices' or 'torus_knot'")


def _emit_json(doc) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def _points_list(arr):
    return [[float(v) for v in row] for row in np.asarray(arr)]


def _workers() -> int:
    raw = os.environ.get("PEARL_THREADS", "").strip()
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigError(f"PEARL_THREADS must be an integer, got {raw!r}")
        return max(1, cap)
    return max(1, os.cpu_count() or 1)


def _require_config(args) -> RunConfig:
    if not args.config:
        raise ConfigError("this subcommand needs --config PATH")
    cfg = load_config(args.config)
    if args.tol is not None:
        cfg = replace(cfg, tolerance=args.tol)
    if args.epsilon is not None:
        cfg = replace(cfg, epsilon=args.epsilon)
    if args.depth is not None:
        cfg = replace(cfg, max_depth=args.depth)
    if args.budget is not None:
        cfg = replace(cfg, budget=args.budget)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    return cfg


def _cmd_validate(args) -> int:
    cfg = _require_config(args)
    nk = build_necklace(cfg)
    _emit_json(
        {
            "n": nk.n,
            "tol": nk.tol,
            "radii": [float(r) for r in nk.radii],
            "tangencies": nk.n,
            "tangency_points": _points_list(nk.tangency_points),
        }
    )
    return 0


def _cmd_stage(args) -> int:
    cfg = _require_config(args)
    nk = build_necklace(cfg)
    k = args.k
    sn = stage(nk, k, cfg.budget)
    plain, mirror = parity_counts(nk, k)
    doc = {
        "k": k,
        "pearls": len(sn),
        "plain": plain,
        "mirror": mirror,
        "max_radius": max_radius(nk, k, cfg.budget),
    }
    if k >= 2:
        rep = nesting_check(nk, k - 1, cfg.tolerance, cfg.budget)
        doc["nesting"] = {
            "ok": rep.ok,
            "max_violation": rep.max_violation,
            "containment_violations": len(rep.containment_violations),
            "degree_defects": len(rep.degree_defects),
            "overlap_pairs": len(rep.overlap_pairs),
        }
    else:
        doc["nesting"] = None
    _emit_json(doc)
    return 0


def _cmd_cloud(args) -> int:
    cfg = _require_config(args)
    nk = build_necklace(cfg)
    out = cfg.out or "cloud.ply"
    cloud = enumerate_pruned(
        nk, cfg.epsilon, cfg.max_depth, cfg.budget, workers=_workers()
    )
    if out.endswith(".xyz"):
        formats.write_xyz(out, cloud.points)
    else:
        formats.write_ply(out, cloud.points)
    _emit_json(
        {
            "out": out,
            "points": len(cloud),
            "epsilon": cloud.epsilon,
            "capped": cloud.capped,
        }
    )
    return 0


def _cmd_template(args) -> int:
    cfg = _require_config(args)
    nk = build_necklace(cfg)
    k = args.k
    out = cfg.out or f"template_{k}.obj"
    co = cyclic_order(nk, k, cfg.tolerance, cfg.budget)
    balls = {nd.address: nd.ball for nd in stage(nk, k, cfg.budget).nodes}
    verts = []
    for i, addr in enumerate(co.order):
        nxt = co.order[(i + 1) % len(co.order)]
        res = tangency(balls[addr], balls[nxt], cfg.tolerance)
        verts.append(res.point)
    formats.write_obj_polyline(out, np.asarray(verts), closed=True)
    _emit_json({"out": out, "k": k, "vertices": len(verts)})
    return 0


def _cmd_coords(args) -> int:
    cfg = _require_config(args)
    nk = build_necklace(cfg)
    k = args.k
    out = cfg.out or f"coords_{k}.csv"
    co = cyclic_order(nk, k, cfg.tolerance, cfg.budget)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["address", "theta_lo", "theta_hi", "x", "y", "z"])
        for addr in co.order:
            iv = necklace_coordinate(nk, addr)
            p = point_of(nk, addr)
            writer.writerow(
                [
                    "-".join(str(j) for j in addr),
                    str(iv.lo),
                    str(iv.hi),
                    formats.fmt_float(p[0]),
                    formats.fmt_float(p[1]),
                    formats.fmt_float(p[2]),
                ]
            )
    _emit_json({"out": out, "k": k, "rows": len(co.order)})
    return 0


def _parse_point(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"point must be 'x,y,z', got {text!r}")
    try:
        return vec(*(float(v) for v in parts))
    except ValueError as exc:
        raise ConfigError(f"bad point {text!r}: {exc}") from exc


def _cmd_homog(args) -> int:
    cfg = _require_config(args)
    nk = build_necklace(cfg)
    depth = args.depth if args.depth is not None else 6
    p = _parse_point(args.p)
    q = _parse_point(args.q)
    h = lambda_homeo(nk, p, q, depth, cfg.tolerance)
    rep = verify_homeo(nk, h, HOMOG_SAMPLES)
    doc = {
        "source": [float(v) for v in h.source],
        "target": [float(v) for v in h.target],
        "delta": str(h.delta),
        "depth": depth,
        "image_of_source": [float(v) for v in h(p)],
        "verify": {
            "samples": rep.samples,
            "membership_failures": rep.membership_failures,
            "injective": rep.injective,
            "surjective_stage": rep.surjective_stage,
            "surjective": rep.surjective,
            "order_preserved": rep.order_preserved,
            "max_gap_distortion": rep.max_gap_distortion,
            "all_passed": rep.all_passed,
        },
    }
    if cfg.out:
        golden = (np.sqrt(5.0) - 1.0) / 2.0
        from fractions import Fraction

        from .coding import point_from_coordinate

        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "y", "z", "hx", "hy", "hz"])
            for i in range(HOMOG_SAMPLES):
                t = Fraction((0.5 + i * golden) % 1.0)
                xpt = point_from_coordinate(nk, t, depth)
                ypt = h(xpt)
                writer.writerow([formats.fmt_float(v) for v in (*xpt, *ypt)])
        doc["out"] = cfg.out
    _emit_json(doc)
    return 0


def _cmd_fiber(args) -> int:
    stats = fiber_stats(args.n, args.g, args.k)
    _emit_json(
        {
            "n": args.n,
            "g": args.g,
            "k": args.k,
            "plain": stats.copies_plain,
            "mirror": stats.copies_mirror,
            "total": stats.total_copies,
            "euler_char": stats.euler_char,
            "genus": stats.genus,
            "arcs": stats.total_copies - 1,
        }
    )
    return 0


def _cmd_hausdorff(args) -> int:
    def load(path):
        if path.endswith(".xyz"):
            return formats.read_xyz(path)
        return formats.read_ply(path)

    d = hausdorff(load(args.a), load(args.b))
    sys.stdout.write(formats.fmt_float(d) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="output file path")
    common.add_argument("--epsilon", type=float, metavar="F", help="pruning radius")
    common.add_argument("--depth", type=int, metavar="N", help="max depth / stage resolution")
    common.add_argument("--budget", type=int, metavar="N", help="orbit node budget")
    common.add_argument("--tol", type=float, metavar="F", help="validation tolerance")

    parser = argparse.ArgumentParser(
        prog="pearlknots",
        description="Reflection-orbit engine for pearl necklaces and their limit-set knots.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common]).set_defaults(func=_cmd_validate)
    p = sub.add_parser("stage", parents=[common])
    p.add_argument("k", type=int)
    p.set_defaults(func=_cmd_stage)
    sub.add_parser("cloud", parents=[common]).set_defaults(func=_cmd_cloud)
    p = sub.add_parser("template", parents=[common])
    p.add_argument("k", type=int)
    p.set_defaults(func=_cmd_template)
    p = sub.add_parser("coords", parents=[common])
    p.add_argument("k", type=int)
    p.set_defaults(func=_cmd_coords)
    p = sub.add_parser("homog", parents=[common])
    p.add_argument("p", help="source point 'x,y,z'")
    p.add_argument("q", help="target point 'x,y,z'")
    p.set_defaults(func=_cmd_homog)
    p = sub.add_parser("fiber", parents=[common])
    p.add_argument("n", type=int)
    p.add_argument("g", type=int)
    p.add_argument("k", type=int)
    p.set_defaults(func=_cmd_fiber)
    p = sub.add_parser("hausdorff", parents=[common])
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=_cmd_hausdorff)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _emit_json({"error": "ConfigError", "message": str(exc)})
        return 2
    except PearlError as exc:
        _emit_json({"error": type(exc).__name__, "message": str(exc)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
