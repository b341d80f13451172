"""Command line interface.

Subcommands:
  simulate <config.json>          run a flow experiment and write its outputs
  modulus <inner.csv> <outer.csv> solve the conformal modulus of one annulus
  soliton <name> [key=value ...]  emit an exact-solution curve as CSV
  verify [filter]                 run the built-in verification suite
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from .analytic import ORACLES
from .capacity import SolverParams, solve_capacity_fd, solve_capacity_mfs
from .config import ConfigError, build_ambient, load_config
from .geometry import NestedAnnulus, read_curve_csv, write_curve_csv
from .verify import format_report, run_checks

log = logging.getLogger(__name__)


def _cmd_simulate(args) -> int:
    from .experiment import run_experiment

    cfg = load_config(args.config)
    trace = run_experiment(cfg)
    n = len(trace.records)
    finite = [r.h for r in trace.records if math.isfinite(r.h)]
    print(f"records: {n}")
    if finite:
        print(f"h: {finite[0]:.8g} -> {finite[-1]:.8g}")
    if "error" in trace.metadata:
        err = trace.metadata["error"]
        print(f"flow stopped early: {err['type']} at t = {err['t']:.6g}")
    if cfg.output_dir:
        print(f"outputs in {cfg.output_dir}")
    return 0


def _cmd_modulus(args) -> int:
    spec = {"kind": args.ambient}
    if args.ambient == "cylinder":
        spec["circumference"] = args.circumference
    if args.K0 is not None:
        spec["K0"] = args.K0
    ambient = build_ambient(spec)
    period = ambient.period
    inner = read_curve_csv(args.inner, period=period)
    outer = read_curve_csv(args.outer, period=period)
    annulus = NestedAnnulus(inner, outer, ambient)
    solver = solve_capacity_fd if args.method == "fd" else solve_capacity_mfs
    sol = solver(annulus, SolverParams())
    if args.json:
        json.dump(sol.to_json(), sys.stdout, indent=2)
        print()
    else:
        print(f"h = {sol.h:.12g}")
        print(f"E = {sol.E:.12g}")
        print(f"boundary_residual = {sol.boundary_residual:.3e}")
    return 0


def _parse_params(pairs):
    out = {}
    for item in pairs:
        if "=" not in item:
            raise SystemExit(f"parameter {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        try:
            out[key] = int(value) if key == "n" else float(value)
        except ValueError:
            raise SystemExit(f"parameter {item!r} has a non-numeric value")
    return out


def _cmd_soliton(args) -> int:
    if args.name not in ORACLES:
        print(f"unknown soliton {args.name!r}; available: {', '.join(sorted(ORACLES))}",
              file=sys.stderr)
        return 2
    oracle = ORACLES[args.name]
    try:
        curve = oracle.generate(**_parse_params(args.params))
    except TypeError as exc:
        print(f"bad parameters for {args.name}: {exc}", file=sys.stderr)
        return 2
    path = args.out or f"{args.name}.csv"
    write_curve_csv(curve, path)
    print(f"{oracle.doc}")
    print(f"wrote {curve.n} vertices to {path}")
    return 0


def _cmd_verify(args) -> int:
    results = run_checks(args.filter)
    if not results:
        print(f"no verification check matches {args.filter!r}", file=sys.stderr)
        return 0
    print(format_report(results))
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annulusflow",
        description="Curve shortening flow of nested curves with conformal-modulus tracking.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a flow experiment from a JSON config")
    p.add_argument("config")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("modulus", help="conformal modulus of the annulus between two curves")
    p.add_argument("inner")
    p.add_argument("outer")
    p.add_argument("--ambient", default="plane",
                   choices=["plane", "cylinder", "sphere", "hyperbolic"])
    p.add_argument("--circumference", type=float, default=1.0)
    p.add_argument("--K0", type=float, default=None)
    p.add_argument("--method", default="mfs", choices=["mfs", "fd"])
    p.add_argument("--json", action="store_true", help="dump the full solution as JSON")
    p.set_defaults(func=_cmd_modulus)

    p = sub.add_parser("soliton", help="emit an exact-solution curve as CSV")
    p.add_argument("name")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_soliton)

    p = sub.add_parser("verify", help="run the built-in verification suite")
    p.add_argument("filter", nargs="?", default="")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
