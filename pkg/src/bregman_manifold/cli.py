"""Command-line front end: ``bregman-manifold <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 domain or input error,
3 solver failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .chart import Point
from .divergence import (bregman, check_pythagoras, dual_bregman, fenchel_young, jensen,
                         jensen_bregman)
from .exceptions import (BothRootsAtQ, DegenerateQuadratic, DegenerateVector, DomainError,
                         EmptyIntersection, NoConvergence, SingularSystem)
from .generator import BregmanGenerator, ItakuraSaito, generator_from_dict
from .geodesic import DEFAULT_SAMPLES, Geodesic
from .render import Scene, to_svg
from .sphere import SphereSpec, all_sphere_samples, sphere_residual
from .triangle import (EDGE_TYPES, GeodesicTriangle, dual_pythagoras_flats, interior_angles,
                       right_angle_flat, solve_double_right, solve_dual_pythagoras,
                       solve_dual_pythagoras_is2d)
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_SOLVER = 0, 1, 2, 3
SOLVER_ERRORS = (SingularSystem, NoConvergence, DegenerateQuadratic, BothRootsAtQ,
                 EmptyIntersection)


class InputError(ValueError):
    pass


# -- formatting --------------------------------------------------------------

def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return "%.17g" % x


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written by :func:`fmt`; non-finite floats become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(float(obj)) if math.isfinite(obj) else "null"
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- input parsing -----------------------------------------------------------

def _load_json(source: str):
    """Parse inline JSON, a file path, or '-' for stdin."""
    if source == "-":
        text = sys.stdin.read()
    elif os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"cannot parse JSON from {source!r}: {exc}") from exc


def _vector(text: str) -> list[float]:
    text = text.strip()
    try:
        if text.startswith("["):
            vals = json.loads(text)
        else:
            vals = [float(v) for v in text.split(",") if v.strip()]
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot parse coordinates {text!r}") from exc
    if not isinstance(vals, list) or not vals:
        raise InputError(f"expected a list of numbers, got {text!r}")
    return [float(v) for v in vals]


def _generator(source) -> BregmanGenerator:
    obj = _load_json(source) if isinstance(source, str) else source
    return generator_from_dict(obj)


def _both_charts(pt: Point) -> dict:
    return {"theta": pt.theta, "eta": pt.eta}


# -- subcommands -------------------------------------------------------------

def cmd_divergence(args) -> int:
    gen = _generator(args.generator)
    t1 = gen.check_theta(_vector(args.theta1), "theta1")
    t2 = gen.check_theta(_vector(args.theta2), "theta2")
    e1, e2 = gen.gradient(t1), gen.gradient(t2)
    report = {
        "bregman": float(bregman(gen, t1, t2)),
        "dual_bregman": float(dual_bregman(gen, e1, e2)),
        "fenchel_young": float(fenchel_young(gen, t1, e2)),
        "jensen": float(jensen(gen, t1, t2)),
        "jensen_bregman": float(jensen_bregman(gen, t1, t2)),
    }
    _emit(dumps(report), args.out)
    return EXIT_OK


def _triangle_scene(gen, T: GeodesicTriangle, chart: str, samples: int, extra=()) -> Scene:
    scene = Scene(xlabel=f"{chart}1", ylabel=f"{chart}2")
    for a, b, tag in T.edge_list():
        g = Geodesic(a, b, "primal" if tag == "p" else "dual")
        scene.add_polyline(g.sample(samples, chart), "primal" if tag == "p" else "dual")
    for name, pt in zip("pqr", T.vertices()):
        scene.add_point(pt.coords(chart), name)
    for name, pt in extra:
        scene.add_point(pt.coords(chart), name)
    return scene


def cmd_triangle(args) -> int:
    scene_obj = _load_json(args.scene)
    if not isinstance(scene_obj, dict):
        raise InputError("scene JSON must be an object")
    gen_src = args.generator if args.generator else scene_obj.get("generator")
    if gen_src is None:
        raise InputError("no generator: pass --generator or put one in the scene")
    gen = _generator(gen_src)
    edges = args.type or scene_obj.get("edges", "ppp")
    for k in ("p", "q"):
        if k not in scene_obj:
            raise InputError(f"scene lacks vertex {k!r}")
    p = Point.from_theta(gen, scene_obj["p"])
    q = Point.from_theta(gen, scene_obj["q"])
    report: dict = {"generator": gen.to_dict()}

    if args.solve == "double-right":
        r_theta = solve_double_right(gen, p, q)
        report["solver"] = {"method": "double-right", "r": r_theta}
    elif args.solve == "dual-pythagoras":
        if isinstance(gen, ItakuraSaito) and gen.dim == 2:
            r_theta = solve_dual_pythagoras_is2d(p, q)
        else:
            roots = solve_dual_pythagoras(gen, p, q)
            if not roots:
                raise EmptyIntersection("the flats meet only at q")
            r_theta = roots[0]
        f_eta, f_theta = dual_pythagoras_flats(gen, p, q)
        report["solver"] = {"method": "dual-pythagoras", "r": r_theta,
                            "eta_flat": f_eta.to_dict(), "theta_flat": f_theta.to_dict()}
    elif args.solve == "single-right-flat":
        flat = right_angle_flat(gen, p, q)
        report["solver"] = {"method": "single-right-flat", "flat": flat.to_dict()}
        r_theta = scene_obj.get("r")
        if r_theta is not None:
            report["solver"]["r_residual"] = float(flat.relative_residual(
                gen.check_theta(r_theta, "r")))
    else:
        r_theta = scene_obj.get("r")
    if r_theta is None:
        raise InputError("scene lacks vertex 'r' and no --solve method produces one")

    r = Point.from_theta(gen, r_theta)
    T = GeodesicTriangle(p, q, r, edges)
    angles = interior_angles(T)
    report["vertices"] = {"p": _both_charts(p), "q": _both_charts(q), "r": _both_charts(r)}
    report["edges"] = T.edges
    report["angles"] = {"radians": angles.as_dict(), "degrees": angles.as_dict(degrees=True)}
    report["pythagoras"] = check_pythagoras(gen, p, q, r).as_dict()

    if args.format == "svg":
        if gen.dim != 2:
            raise InputError("SVG output needs a 2D manifold")
        _emit(to_svg(_triangle_scene(gen, T, args.chart, args.samples)), args.out)
    else:
        _emit(dumps(report), args.out)
    return EXIT_OK


def cmd_sphere(args) -> int:
    spec = SphereSpec(args.kind, _vector(args.center), args.radius)
    patches = all_sphere_samples(spec, args.grid)
    D = spec.dim
    if args.format == "csv":
        header = [f"u{i + 1}" for i in range(D)] + [f"x{i + 1}" for i in range(D)] + ["residual"]
        lines = [",".join(header)]
        for _, u, x in patches:
            res = sphere_residual(spec, x)
            for ui, xi, ri in zip(u, x, res):
                lines.append(",".join(fmt(v) for v in (*ui, *xi, ri)))
        _emit("\n".join(lines), args.out)
    elif args.format == "svg":
        if D != 2:
            raise InputError("SVG output needs a 2D sphere")
        scene = Scene(xlabel="theta1", ylabel="theta2")
        for _, _, x in patches:
            scene.add_polyline(x, "curve")
        scene.add_point(spec.center, "c")
        _emit(to_svg(scene), args.out)
    else:
        out = {"kind": spec.kind, "center": spec.center, "radius": spec.radius,
               "patches": [{"orthant": list(o), "u": u, "x": x,
                            "max_residual": float(np.max(np.abs(sphere_residual(spec, x))))}
                           for o, u, x in patches]}
        _emit(dumps(out), args.out)
    return EXIT_OK


def cmd_geodesic(args) -> int:
    gen = _generator(args.generator)
    g = Geodesic.from_theta(gen, _vector(args.a), _vector(args.b), args.kind)
    pts = g.sample(args.samples, args.chart)
    t = np.linspace(0.0, 1.0, args.samples + 1)
    if args.format == "csv":
        cols = ["x", "y"] if gen.dim == 2 else [f"x{i + 1}" for i in range(gen.dim)]
        lines = [",".join(["t"] + cols)]
        lines += [",".join(fmt(v) for v in (ti, *row)) for ti, row in zip(t, pts)]
        _emit("\n".join(lines), args.out)
    elif args.format == "svg":
        if gen.dim != 2:
            raise InputError("SVG output needs a 2D manifold")
        scene = Scene(xlabel=f"{args.chart}1", ylabel=f"{args.chart}2")
        scene.add_polyline(pts, g.kind)
        scene.add_point(g.a.coords(args.chart), "a")
        scene.add_point(g.b.coords(args.chart), "b")
        _emit(to_svg(scene), args.out)
    else:
        _emit(dumps({"kind": g.kind, "chart": args.chart, "t": t, "points": pts}), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    gen = _generator(args.generator)
    results = []
    for suite in (SUITES if args.suite == "all" else (args.suite,)):
        results += [(suite, c) for c in run_suite(suite, gen, args.n, args.seed)]
    failed = any(not c.passed for _, c in results)
    if args.format == "json":
        _emit(dumps({"passed": not failed,
                     "checks": [{"suite": s, "name": c.name, "worst": c.worst, "tol": c.tol,
                                 "passed": c.passed, "skipped": c.skipped, "detail": c.detail}
                                for s, c in results]}), args.out)
    else:
        lines = [f"[{s}] {c.line()}" for s, c in results]
        lines.append("FAILED" if failed else "OK")
        _emit("\n".join(lines), args.out)
    return EXIT_VERIFY if failed else EXIT_OK


# -- parser ------------------------------------------------------------------

def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bregman-manifold",
        description="Geometry of dually flat (Bregman) manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--chart", choices=("theta", "eta"), default="theta")
    common.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)

    gen_help = "generator JSON: inline text, a file path, or '-' for stdin"

    p = sub.add_parser("divergence", parents=[common], help="evaluate divergences of two points")
    p.add_argument("generator", help=gen_help)
    p.add_argument("theta1", help="coordinates, e.g. '1,2' or '[1,2]'")
    p.add_argument("theta2")
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("triangle", parents=[common], help="measure or construct a triangle")
    p.add_argument("scene", help="triangle JSON {p, q, r, edges[, generator]}; file, text or '-'")
    p.add_argument("--generator", help=gen_help)
    p.add_argument("--type", choices=EDGE_TYPES, help="edge types, overriding the scene")
    p.add_argument("--solve", choices=("double-right", "dual-pythagoras", "single-right-flat"))
    p.add_argument("--format", choices=("json", "svg"), default="json")
    p.set_defaults(func=cmd_triangle)

    p = sub.add_parser("sphere", parents=[common], help="sample a Bregman sphere")
    p.add_argument("--kind", choices=("extended_kl", "itakura_saito"), required=True)
    p.add_argument("--center", required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--grid", type=_positive_int, default=64)
    p.add_argument("--format", choices=("csv", "svg", "json"), default="csv")
    p.set_defaults(func=cmd_sphere)

    p = sub.add_parser("geodesic", parents=[common], help="sample a primal or dual geodesic")
    p.add_argument("generator", help=gen_help)
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--kind", choices=("primal", "dual"), default="primal")
    p.add_argument("--format", choices=("csv", "svg", "json"), default="csv")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("verify", parents=[common], help="run seeded invariant suites")
    p.add_argument("generator", help=gen_help)
    p.add_argument("--suite", choices=SUITES + ("all",), default="identities")
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_verify)
    return parser


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(f"error: {message}\n")
    sys.stdout.write(dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SOLVER_ERRORS as exc:
        return _error(type(exc).__name__, str(exc), EXIT_SOLVER)
    except (DomainError, DegenerateVector, InputError, ValueError, TypeError, OSError) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_DOMAIN)


if __name__ == "__main__":
    sys.exit(main())
