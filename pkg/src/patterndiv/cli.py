"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 capability refusal (oracle cap).
Geometry files are CSV with columns ``id,theta_deg,distance_m,ring_radius_m``
(optional header row); angles are in degrees.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from typing import Optional, Sequence

from . import asrgraph, channel, coloring, simharness

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_REFUSED = 3


class InputError(Exception):
    pass


def read_geometry(path: str) -> list[channel.ClusterGeometry]:
    """Parse a geometry CSV, raising :class:`InputError` with the line number."""
    try:
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    geoms = []
    seen = set()
    for lineno, row in enumerate(csv.reader(lines), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if lineno == 1 and row[0].strip().lower() == "id":
            continue
        if len(row) != 4:
            raise InputError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
        try:
            gid = int(row[0])
            theta_deg, dist, ring = (float(x) for x in row[1:])
        except ValueError:
            raise InputError(f"{path}:{lineno}: could not parse numbers") from None
        if gid < 0 or gid in seen:
            raise InputError(f"{path}:{lineno}: cluster id {gid} is negative or repeated")
        if not all(math.isfinite(x) for x in (theta_deg, dist, ring)):
            raise InputError(f"{path}:{lineno}: non-finite value")
        try:
            geoms.append(channel.ClusterGeometry.from_ring(gid, math.radians(theta_deg), dist, ring))
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        seen.add(gid)
    return geoms


def _read_graph(path: str):
    try:
        return asrgraph.read_edgelist(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _resolve_P(P: Optional[int], hint: int) -> int:
    P = hint if P is None else P
    if P is None or P < 1:
        raise InputError("a pattern budget P >= 1 is required (--P or a header hint)")
    return P


def cmd_supports(args) -> int:
    for geom in read_geometry(args.geometry):
        print(f"{geom.id}: {channel.support_set(geom, args.M, args.D)}")
    return EXIT_OK


def cmd_graph(args) -> int:
    geoms = sorted(read_geometry(args.geometry), key=lambda g: g.id)
    if [g.id for g in geoms] != list(range(len(geoms))):
        raise InputError(f"{args.geometry}: cluster ids must be 0..G-1 to form a graph")
    if not 0 < args.epsilon <= 1 or args.wmin < 0:
        raise InputError("require 0 < epsilon <= 1 and wmin >= 0")
    supports = channel.support_sets(geoms, args.M, args.D)
    graph = asrgraph.build_graph(supports, args.epsilon, args.wmin)
    sys.stdout.write(asrgraph.format_edgelist(graph, args.P or 0))
    return EXIT_OK


def cmd_color(args) -> int:
    graph, hint = _read_graph(args.graph)
    P = _resolve_P(args.P, hint or None)
    try:
        assignment, trace = coloring.ewvc_pd(graph, P)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    sys.stdout.write(assignment.format(graph))
    print(f"phase2_bypassed {str(trace.phase2Bypassed).lower()}")
    return EXIT_OK


def cmd_oracle_compare(args) -> int:
    graph, hint = _read_graph(args.graph)
    P = _resolve_P(args.P, hint or None)
    try:
        assignment, _ = coloring.ewvc_pd(graph, P)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    try:
        _, f_star = coloring.esa_oracle(graph, P, args.oracle_cap)
    except coloring.OracleCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    f = coloring.objective_f(graph, assignment)
    gap = f - f_star
    if abs(gap) < 1e-12:
        gap = 0.0
    print(f"heuristic {f:.12g}")
    print(f"oracle {f_star:.12g}")
    print(f"gap {gap:.12g}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        config = simharness.load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.oracle_cap is not None:
            overrides["oracleCap"] = args.oracle_cap
        if overrides:
            config = config.with_(**overrides)
    except OSError as exc:
        raise InputError(f"{args.config}: {exc.strerror or exc}") from None
    except simharness.ConfigError as exc:
        raise InputError("invalid config:\n  " + "\n  ".join(exc.errors)) from None
    report = simharness.run_experiment(config, keep_trials=args.per_trial is not None)
    simharness.write_report(report, config.outputPath)
    if args.per_trial is not None:
        simharness.write_per_trial(report.records, args.per_trial)
    print(f"rows {len(report.rows)}")
    print(f"report {config.outputPath}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patterndiv",
        description="Pattern division for two-layer precoding in FDD massive MIMO.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("supports", help="print DFT support sets of clusters")
    p.add_argument("geometry", help="geometry CSV: id,theta_deg,distance_m,ring_radius_m")
    p.add_argument("--M", type=int, default=128)
    p.add_argument("--D", type=float, default=0.5)
    p.set_defaults(func=cmd_supports)

    p = sub.add_parser("graph", help="build the overlap graph and print it as an edge list")
    p.add_argument("geometry")
    p.add_argument("--M", type=int, default=128)
    p.add_argument("--D", type=float, default=0.5)
    p.add_argument("--P", type=int, default=0, help="pattern hint written to the header")
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--wmin", type=float, default=0.0)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("color", help="run EWVC-PD on an edge-list graph")
    p.add_argument("graph")
    p.add_argument("--P", type=int, default=None)
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("oracle-compare", help="compare EWVC-PD with exhaustive search")
    p.add_argument("graph")
    p.add_argument("--P", type=int, default=None)
    p.add_argument("--oracle-cap", type=int, default=coloring.DEFAULT_ORACLE_CAP)
    p.set_defaults(func=cmd_oracle_compare)

    p = sub.add_parser("simulate", help="run a Monte-Carlo experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--per-trial", metavar="PATH", default=None,
                   help="also write one CSV row per trial")
    p.add_argument("--oracle-cap", type=int, default=None)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if hasattr(args, "M") and (args.M < 1 or not args.D > 0):
            raise InputError("--M must be positive and --D must be positive")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
