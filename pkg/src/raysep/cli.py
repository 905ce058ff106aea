"""Command-line entry point: ``raysep trace-ray | verify | render``."""
from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
import tempfile

from . import __version__
from .address import ExternalAddress
from .maps import EXP, Box, MapSpec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_VERDICT = 4
EXIT_IO = 5


class UsageError(Exception):
    pass


def atomic_write(path: str, data: bytes):
    """Write-then-rename so readers never see a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".raysep-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n").encode()


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"malformed size {text!r}; expected WxH") from None
    if w < 1 or h < 1:
        raise UsageError("image size must be positive")
    return w, h


def _parse_map(text: str) -> MapSpec:
    try:
        return MapSpec.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_box(text: str | None, m: MapSpec) -> Box:
    if text is None:
        return Box(-4, -8, 4, 8) if m.family == EXP else Box(-2, -2, 2, 2)
    try:
        return Box.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _stamp(report: dict, deterministic: bool) -> dict:
    if not deterministic:
        report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return report


def cmd_trace_ray(args) -> int:
    from .polyoracle import ExternalAngle, external_ray_quadratic, land_quadratic_ray
    from .rays import REACHED_T_MIN, TraceConfig, land_ray, trace_ray

    m = _parse_map(args.map)
    if m.family == EXP:
        if args.angle is not None or args.address is None:
            raise UsageError("exponential maps take --address (e.g. '|0'), not --angle")
        try:
            a = ExternalAddress.parse(args.address)
            tc = TraceConfig(t_max=args.tmax, t_min=args.tmin, depth=args.depth)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        tr = trace_ray(m, a, config=tc)
        out = tr.to_json()
        if args.land and a.is_periodic:
            out["landing"] = land_ray(m, a, tc, trace=tr).to_json()
        ok = tr.truncation == REACHED_T_MIN
    else:
        if args.address is not None or args.angle is None:
            raise UsageError("quadratic maps take --angle (e.g. 1/3); addresses are exponential-only")
        try:
            ang = ExternalAngle.parse(args.angle)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        tr = external_ray_quadratic(m.parameter, ang)
        out = tr.to_json()
        if args.land:
            out["landing"] = land_quadratic_ray(m.parameter, ang).to_json()
        ok = tr.truncation == REACHED_T_MIN
    out.update({"map": str(m), "version": __version__,
                "config": {"t_max": args.tmax, "t_min": args.tmin, "depth": args.depth}})
    _write(args.out, dump_json(_stamp(out, args.deterministic)))
    if args.render:
        from .render import render

        w, h = _parse_size(args.render)
        box = _parse_box(args.box, m)
        img = render(m, box, w, h, orbit=tr.z)
        _write(args.image or (os.path.splitext(args.out)[0] + ".ppm"), img)
    if not ok:
        print(f"trace truncated: {tr.truncation}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_verify(args) -> int:
    from .pipeline import FAIL, RunConfig, verify

    m = _parse_map(args.map)
    box = _parse_box(args.box, m)
    try:
        cfg = RunConfig(map=str(m), p=args.p, q=args.q, M=args.M, box=str(box), P=args.P,
                        iters=args.iters, deterministic=args.deterministic)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = _stamp(verify(cfg), args.deterministic)
    _write(args.out, dump_json(report))
    print(f"verdict: {report['verdict']}", file=sys.stderr)
    return EXIT_VERDICT if report["verdict"] == FAIL else EXIT_OK


def cmd_render(args) -> int:
    from .polyoracle import land_quadratic_ray, periodic_angles
    from .regions import basic_regions, build_gamma, classify_region_type, group_landings
    from .render import render
    from .singular import trace_singular_orbit

    m = _parse_map(args.map)
    box = _parse_box(args.box, m)
    w, h = _parse_size(args.render)
    if args.p < 1 or args.M < 0:
        raise UsageError("need --p >= 1 and --M >= 0")
    if m.family == EXP:
        gamma = build_gamma(m, args.p, args.M)
        groups, landings = gamma.groups, gamma.landings
    else:
        landings = [land_quadratic_ray(m.parameter, a) for a in periodic_angles(args.p)]
        groups = group_landings(landings)
    d = basic_regions(groups, m=m, p=args.p)
    types = {rid: classify_region_type(d, rid) for rid in d.region_ids}
    orb = trace_singular_orbit(m, d, args.iters)
    img = render(m, box, w, h, decomposition=d, region_types=types, orbit=orb.points,
                 landing_points=[r.landing_point for r in landings if r.landing_point is not None])
    _write(args.out, img)
    return EXIT_OK


def _write(path: str, data: bytes):
    try:
        atomic_write(path, data)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}") from None


class _IOFailure(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="raysep", description=__doc__)
    ap.add_argument("--version", action="version", version=f"raysep {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("trace-ray", help="trace one dynamic or external ray to JSON")
    t.add_argument("--map", required=True, help="exp:re,im or quad:re,im")
    t.add_argument("--address", help="exponential address, e.g. '3|1,2'")
    t.add_argument("--angle", help="quadratic external angle, e.g. 1/3")
    t.add_argument("--tmax", type=float, default=20.0)
    t.add_argument("--tmin", type=float, default=1.0)
    t.add_argument("--depth", type=int, default=12)
    t.add_argument("--land", action="store_true", help="also land the ray (periodic addresses)")
    t.add_argument("--box", help="viewport x0,y0,x1,y1 for --render")
    t.add_argument("--render", help="also write an overlay image of size WxH")
    t.add_argument("--image", help="path of the overlay image")
    t.add_argument("--out", default="ray.json")
    t.add_argument("--deterministic", action="store_true")
    t.set_defaults(func=cmd_trace_ray)

    v = sub.add_parser("verify", help="run the full verification pipeline")
    v.add_argument("--map", required=True)
    v.add_argument("--p", type=int, default=1)
    v.add_argument("--q", type=int)
    v.add_argument("--M", type=int, default=2)
    v.add_argument("--P", type=int, default=3, help="largest period for the cycle count")
    v.add_argument("--box", help="search box x0,y0,x1,y1")
    v.add_argument("--iters", type=int, default=10_000)
    v.add_argument("--out", default="report.json")
    v.add_argument("--deterministic", action="store_true", help="omit the timestamp")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("render", help="write a P6 image of regions, separators and the singular orbit")
    r.add_argument("--map", required=True)
    r.add_argument("--box")
    r.add_argument("--render", default="800x600", help="image size WxH")
    r.add_argument("--p", type=int, default=1)
    r.add_argument("--M", type=int, default=2)
    r.add_argument("--iters", type=int, default=1000)
    r.add_argument("--out", default="render.ppm")
    r.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"raysep: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _IOFailure as exc:
        print(f"raysep: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"raysep: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
