"""Command-line front end.

Three subcommands cover the package's workflows:

  classify  one germ at one point -> classification report JSON
  trace     singular set + special points of a germ over a box
  conslaw   first singularity of a conservation-law problem, with
            optional before/after frames of the singular set

Exit codes are scriptable: 0 for a definite class, 2 for
Degenerate/Unrecognized, 3 when no singularity exists in the requested
region, 64 for malformed input, 70 for solver failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .conslaw import (
    BUILTIN_PROBLEMS,
    ConsLawProblem,
    SolverFailed,
    builtin_problem,
    first_singularity,
    lips_birth_frames,
    singularity_at,
)
from .germs import (
    BUILTIN_GERMS,
    PlaneMapGerm,
    ToleranceConfig,
    classify,
)
from .jets import InvalidSpec
from .locus import (
    BoxDomain,
    NotRegularCurve,
    critical_value_image,
    find_special_points,
    ruling_map,
    sample_singular_set,
)
from .parsing import ParseError, parse_curve, parse_map, parse_reals
from .serialize import dump_json, write_curves_csv, write_svg

EXIT_OK = 0
EXIT_INDEFINITE = 2
EXIT_NO_SINGULARITY = 3
EXIT_USAGE = 64
EXIT_SOLVER = 70

VALID_FORMATS = ("json", "csv", "svg")


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with the package's exit code."""

    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Everything one invocation needs, assembled from flags."""

    command: str
    builtin: str | None = None
    map_expr: str | None = None
    curve_expr: str | None = None
    input_path: str | None = None
    at: str | None = None
    time: str | None = None
    box: BoxDomain = field(default_factory=lambda: BoxDomain((-1.0, -1.0), (1.0, 1.0)))
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    output_dir: Path = field(default_factory=lambda: Path("."))
    formats: tuple[str, ...] = ("json", "csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="planesing",
        description="Singularity recognition for plane-to-plane maps and "
        "first-shock analysis of planar conservation laws.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, default_formats):
        p.add_argument("input", nargs="?", help="path to a JSON input file")
        p.add_argument("--builtin", help="name of a builtin map or problem")
        p.add_argument("--tol-zero", type=float, default=None, metavar="X",
                       help="relative zero threshold (default 1e-7)")
        p.add_argument("--out", default=".", metavar="DIR",
                       help="output directory (default: current)")
        p.add_argument("--format", default=default_formats, metavar="LIST",
                       help=f"comma list from {{{','.join(VALID_FORMATS)}}}")

    pc = sub.add_parser("classify", help="classify one germ at one point")
    add_common(pc, "json")
    pc.add_argument("--map", dest="map_expr", metavar="EXPR",
                    help="inline map, e.g. '(u, v^3+u^2*v)'")
    pc.add_argument("--curve", dest="curve_expr", metavar="EXPR",
                    help="curve for the ruling builtin, e.g. 't,t^3'")
    pc.add_argument("--at", metavar="P",
                    help="base point 'a,b' (or parameter 't0' for ruling)")

    pt = sub.add_parser("trace", help="trace the singular set over a box")
    add_common(pt, "json,csv")
    pt.add_argument("--map", dest="map_expr", metavar="EXPR")
    pt.add_argument("--curve", dest="curve_expr", metavar="EXPR")
    pt.add_argument("--at", metavar="P", help="germ base point (default 0,0)")
    pt.add_argument("--box", default="-1,-1,1,1", metavar="lo1,lo2,hi1,hi2")
    pt.add_argument("--grid", default="64,64", metavar="n1,n2")

    pl = sub.add_parser("conslaw", help="first singularity of a conservation law")
    add_common(pl, "json")
    pl.add_argument("--at", metavar="P",
                    help="forced evaluation point 'a,b' (skips the search)")
    pl.add_argument("--time", metavar="T",
                    help="forced time with --at, or comma list of frame times")
    pl.add_argument("--box", default="-1,-1,1,1", metavar="lo1,lo2,hi1,hi2")
    pl.add_argument("--grid", default="64,64", metavar="n1,n2")
    return parser


def _tolerances(args) -> ToleranceConfig:
    if getattr(args, "tol_zero", None) is None:
        return ToleranceConfig()
    tz = float(args.tol_zero)
    if not (0.0 < tz < 1.0):
        raise ParseError(f"--tol-zero must be in (0, 1), got {tz}")
    return ToleranceConfig(zero_rel=tz)


def _formats(args) -> tuple[str, ...]:
    items = tuple(s.strip() for s in args.format.split(",") if s.strip())
    for f in items:
        if f not in VALID_FORMATS:
            raise ParseError(f"unknown format {f!r}; valid: {', '.join(VALID_FORMATS)}")
    if not items:
        raise ParseError("--format must name at least one format")
    return items


def _box(args) -> BoxDomain:
    lo1, lo2, hi1, hi2 = parse_reals(args.box, 4)
    n1, n2 = parse_reals(args.grid, 2)
    if n1 != int(n1) or n2 != int(n2):
        raise ParseError("--grid expects integers")
    try:
        return BoxDomain((lo1, lo2), (hi1, hi2), (int(n1), int(n2)))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ParseError(f"input file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"input file is not valid JSON: {exc}") from exc


def _germ_from_config(cfg: RunConfig) -> PlaneMapGerm:
    """Build the germ a classify/trace invocation refers to."""
    sources = [s for s in (cfg.builtin, cfg.map_expr, cfg.input_path) if s]
    if len(sources) != 1:
        raise ParseError("provide exactly one of --builtin, --map, or an input file")
    if cfg.builtin == "ruling":
        if not cfg.curve_expr:
            raise ParseError("the ruling builtin needs --curve 'a(t),b(t)'")
        t0 = parse_reals(cfg.at, 1)[0] if cfg.at else 0.0
        try:
            return ruling_map(parse_curve(cfg.curve_expr), t0)
        except NotRegularCurve as exc:
            raise ParseError(str(exc)) from exc
    if cfg.builtin:
        from .germs import builtin_germ

        try:
            germ = builtin_germ(cfg.builtin)
        except KeyError as exc:
            raise ParseError(str(exc.args[0])) from exc
        if cfg.at:
            germ = germ.rebase(parse_reals(cfg.at, 2))
        return germ
    if cfg.map_expr:
        components = parse_map(cfg.map_expr)
        base = parse_reals(cfg.at, 2) if cfg.at else (0.0, 0.0)
        return PlaneMapGerm(components, base)
    data = _load_json(cfg.input_path)
    try:
        components = data["components"]
    except (KeyError, TypeError) as exc:
        raise ParseError('map JSON needs a "components" key with two PolySpecs') from exc
    if not isinstance(components, list) or len(components) != 2:
        raise ParseError('"components" must be a list of two PolySpecs')
    base = tuple(data.get("base_point", (0.0, 0.0)))
    if cfg.at:
        base = parse_reals(cfg.at, 2)
    try:
        return PlaneMapGerm((components[0], components[1]), base)
    except InvalidSpec as exc:
        raise ParseError(str(exc)) from exc


def _class_exit(report) -> int:
    return EXIT_OK if report.is_definite else EXIT_INDEFINITE


def run_classify(cfg: RunConfig) -> int:
    germ = _germ_from_config(cfg)
    report = classify(germ, cfg.tolerances)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    if "json" in cfg.formats:
        dump_json(report.to_dict(), cfg.output_dir / "report.json")
    p = report.base_point
    print(f"class={report.singularity_class} at ({p[0]:g}, {p[1]:g})")
    return _class_exit(report)


def run_trace(cfg: RunConfig) -> int:
    germ = _germ_from_config(cfg)
    curves = sample_singular_set(germ, cfg.box, cfg.tolerances)
    images = critical_value_image(germ, curves)
    specials = find_special_points(germ, cfg.box, cfg.tolerances)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    if "csv" in cfg.formats:
        write_curves_csv(cfg.output_dir / "singular_set.csv", curves)
        write_curves_csv(cfg.output_dir / "critical_values.csv", curves, images)
    if "json" in cfg.formats:
        dump_json(
            {
                "curves": [c.to_dict() for c in curves],
                "special_points": [sp.to_dict() for sp in specials],
            },
            cfg.output_dir / "special_points.json",
        )
    if "svg" in cfg.formats:
        write_svg(cfg.output_dir / "singular_set.svg", curves, specials, cfg.box,
                  label="singular set")
        write_svg(cfg.output_dir / "critical_values.svg", images, (), None,
                  label="critical values")
    kinds = ", ".join(f"{sp.kind}:{sp.report.singularity_class}" for sp in specials)
    print(
        f"curves={len(curves)} special_points={len(specials)}"
        + (f" [{kinds}]" if kinds else "")
    )
    return EXIT_OK


def _problem_from_config(cfg: RunConfig) -> ConsLawProblem:
    sources = [s for s in (cfg.builtin, cfg.input_path) if s]
    if len(sources) != 1:
        raise ParseError("provide exactly one of --builtin or a problem JSON file")
    if cfg.builtin:
        try:
            return builtin_problem(cfg.builtin)
        except KeyError as exc:
            raise ParseError(str(exc.args[0])) from exc
    data = _load_json(cfg.input_path)
    try:
        return ConsLawProblem.from_dict(data)
    except InvalidSpec as exc:
        raise ParseError(str(exc)) from exc


def run_conslaw(cfg: RunConfig) -> int:
    prob = _problem_from_config(cfg)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)

    if cfg.at is not None:
        u = parse_reals(cfg.at, 2)
        t = None
        if cfg.time is not None:
            times = parse_reals(cfg.time)
            if len(times) != 1:
                raise ParseError("forced-point mode takes a single --time value")
            t = times[0]
        try:
            record = singularity_at(prob, u, t, cfg.tolerances)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            print("no singularity at the requested point")
            return EXIT_NO_SINGULARITY
        if "json" in cfg.formats:
            dump_json(record.to_dict(), cfg.output_dir / "point_analysis.json")
        print(
            f"class={record.report.singularity_class} at "
            f"({record.u_star[0]:g}, {record.u_star[1]:g}) t={record.t_star:g}"
        )
        return _class_exit(record.report)

    try:
        result = first_singularity(prob, cfg.box, cfg.tolerances)
    except SolverFailed as exc:
        dump_json(
            {
                "error": "SolverFailed",
                "message": str(exc),
                "best_point": list(exc.best_point) if exc.best_point else None,
                "best_time": exc.best_time,
            },
            cfg.output_dir / "solver_failure.json",
        )
        print(f"solver failure: {exc}", file=sys.stderr)
        if exc.best_point is not None:
            print(
                f"best grid point ({exc.best_point[0]:g}, {exc.best_point[1]:g}) "
                f"at t={exc.best_time:g}",
                file=sys.stderr,
            )
        return EXIT_SOLVER

    if result is None:
        if "json" in cfg.formats:
            dump_json(
                {"result": "NoSingularity", "box": {"lo": list(cfg.box.lo), "hi": list(cfg.box.hi)}},
                cfg.output_dir / "first_singularity.json",
            )
        print("no singularity: characteristic trace is non-negative over the box")
        return EXIT_NO_SINGULARITY

    if "json" in cfg.formats:
        dump_json(result.to_dict(), cfg.output_dir / "first_singularity.json")
    print(
        f"class={result.report.singularity_class} at "
        f"({result.u_star[0]:g}, {result.u_star[1]:g}) t*={result.t_star:g} "
        f"xi3={result.xi[2]:g}"
    )

    if cfg.time is not None:
        times = parse_reals(cfg.time)
        try:
            frames = lips_birth_frames(
                prob, result.u_star, result.t_star, times, cfg.box, cfg.tolerances
            )
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
        manifest = []
        for k, frame in enumerate(frames):
            entry: dict = {"index": k, "t": frame.time}
            if "csv" in cfg.formats:
                name = f"frame_{k}.csv"
                write_curves_csv(cfg.output_dir / name, frame.curves, frame.image_curves)
                entry["csv"] = name
            if "svg" in cfg.formats:
                name = f"frame_{k}.svg"
                write_svg(cfg.output_dir / name, frame.curves, (), cfg.box,
                          label=f"t={frame.time:g}")
                entry["svg"] = name
            entry["curves"] = len(frame.curves)
            manifest.append(entry)
        if "json" in cfg.formats:
            dump_json({"t_star": result.t_star, "frames": manifest},
                      cfg.output_dir / "frames.json")

    return _class_exit(result.report)


_VALUE_FLAGS = {"--box", "--grid", "--at", "--time", "--tol-zero"}
_NUMERIC_START = re.compile(r"^-(\d|\.\d)")


def _merge_negative_values(argv):
    """Join numeric option values onto their flag with '='.

    argparse mistakes a value like "-1,-1,1,1" for an option name, so
    "--box -1,-1,1,1" would be rejected while "--box=-1,-1,1,1" parses.
    Accept both by rewriting the former into the latter.
    """
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and _NUMERIC_START.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_merge_negative_values(list(argv)))
    try:
        cfg = RunConfig(
            command=args.command,
            builtin=args.builtin,
            map_expr=getattr(args, "map_expr", None),
            curve_expr=getattr(args, "curve_expr", None),
            input_path=args.input,
            at=getattr(args, "at", None),
            time=getattr(args, "time", None),
            box=_box(args) if hasattr(args, "box") else BoxDomain((-1, -1), (1, 1)),
            tolerances=_tolerances(args),
            output_dir=Path(args.out),
            formats=_formats(args),
        )
        if cfg.command == "classify":
            return run_classify(cfg)
        if cfg.command == "trace":
            return run_trace(cfg)
        return run_conslaw(cfg)
    except (ParseError, InvalidSpec) as exc:
        print(f"planesing: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
