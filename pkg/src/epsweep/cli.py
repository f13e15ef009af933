"""Command line entry point.

Examples:
  epsweep list-scenarios
  epsweep sweep --scenario part1-fig1ab --out out/ --points 2001
  epsweep ep-find --scenario part2-fig9
  epsweep smatrix --resonance 0.5,0.1 --resonance 0.5,0.1 --out out/
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import smat, spectral
from .scenario import Scenario, ScenarioError, get_scenario, list_scenarios
from .sweep import SearchMode, line_shape_csv, run_ep_search, run_smatrix, run_sweep

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3


def _load_scenario(args) -> Scenario:
    if args.config:
        sc = Scenario.from_json(Path(args.config).read_text(encoding="utf-8"))
    elif args.scenario:
        sc = get_scenario(args.scenario)
    else:
        raise ScenarioError("give --scenario or --config")
    if args.points is not None:
        sc = sc.with_points(args.points)
    return sc


def _write(out: str | None, name: str, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text, encoding="utf-8", newline="\n")
    print("wrote", d / name, file=sys.stderr)


def _parse_resonance(text: str) -> tuple[float, float]:
    try:
        e, g = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected E,WIDTH, got {text!r}")
    return e, g


def cmd_sweep(args) -> int:
    sc = _load_scenario(args)
    result = run_sweep(sc, workers=args.workers)
    _write(args.out, f"{sc.id or 'scenario'}.csv", result.to_csv())
    if any(not r.ok for r in result.rows):
        print("solver failed on some rows (marked ERR)", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_ep_find(args) -> int:
    sc = _load_scenario(args)
    mode = SearchMode(args.mode)
    report = run_ep_search(sc, mode, tol=args.tol, continue_complex=not args.real_only)
    _write(args.out, f"{sc.id or 'scenario'}_eps.json", json.dumps(report.to_dict(), indent=2) + "\n")
    return EXIT_OK


def cmd_smatrix(args) -> int:
    if not args.resonance:
        raise ValueError("give at least one --resonance E,WIDTH")
    res = [smat.Resonance(e, g) for e, g in args.resonance]
    lo = args.emin if args.emin is not None else min(r.energy - 5 * r.width for r in res)
    hi = args.emax if args.emax is not None else max(r.energy + 5 * r.width for r in res)
    grid = np.linspace(lo, hi, args.points or 2001)
    shape = run_smatrix(res, grid, double_pole=args.double_pole)
    _write(args.out, "smatrix.csv", line_shape_csv(shape))
    return EXIT_OK


def cmd_list(args) -> int:
    entries = list_scenarios()
    if args.json:
        sys.stdout.write(json.dumps(entries, indent=2, sort_keys=True) + "\n")
    else:
        for e in entries:
            print(f"{e['id']:24s} {e['figure']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="epsweep", description="Exceptional point sweeps for small non-Hermitian models")
    sub = ap.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--scenario", help="preset id (see list-scenarios)")
        g.add_argument("--config", help="scenario JSON document")
        p.add_argument("--out", help="output directory (default: stdout)")
        p.add_argument("--points", type=int, help="override grid size")

    p = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    scenario_args(p)
    p.add_argument("--workers", type=int, default=None, help="threads for the decompositions")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ep-find", help="locate exceptional points")
    scenario_args(p)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--mode", choices=[m.value for m in SearchMode], default=SearchMode.SCAN_1D.value)
    p.add_argument("--real-only", action="store_true", help="skip continuation into complex parameters")
    p.set_defaults(func=cmd_ep_find)

    p = sub.add_parser("smatrix", help="S-matrix line shape table")
    p.add_argument("--resonance", action="append", type=_parse_resonance, metavar="E,WIDTH")
    p.add_argument("--double-pole", action="store_true", help="use the coalesced form (first resonance)")
    p.add_argument("--emin", type=float)
    p.add_argument("--emax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_smatrix)

    p = sub.add_parser("list-scenarios", help="print the preset catalog")
    p.add_argument("--json", action="store_true", help="full parameter records")
    p.set_defaults(func=cmd_list)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ScenarioError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (spectral.SolverError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    raise SystemExit(main())
