"""Command-line interface.

Subcommands:
  certify   certified entropy bound for one correlation pair (JSON/CSV)
  sweep     certified bounds over a square correlation grid (CSV)
  sets      boundary polylines of the quantum set and classical wedge
  coherent  coherent-state operating point: correlations, region, certificate
  oracle    primal upper bound from explicit ensembles
  eval-t    dual objective for a user-supplied multiplier vector

Exit codes: 0 success, 1 flag/validation errors, 2 infeasible input
(correlation outside the quantum set for its budget).

The energy-time budget may be given as --energy/--dt (multiplied together)
or directly as --u (which overrides and is recorded with dt = 1).  Thread
count comes from --threads, else the RANDCERT_THREADS environment variable,
else all available cores; results are identical for every thread count.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import __version__
from ._serialize import emit, to_csv, to_json
from .coherent import (
    CoherentPoint,
    coherent_correlations,
    nonzero_randomness_condition,
    region_mask,
)
from .dual import (
    DiscretizationParams,
    certify,
    diagonal_sweep,
    dual_value,
    inner_min,
    set_threads,
)
from .oracle import best_feasible_ensemble
from .sets import (
    HALF_PI,
    BoundaryCurve,
    InfeasibleInputError,
    boundary_point,
    classical_contains,
    classical_wedge_width,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class _Parser(argparse.ArgumentParser):
    """argparse with exit code 1 (not 2) on flag errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _add_output_flags(p):
    p.add_argument("-o", "--output", metavar="PATH",
                   help="write output to PATH (atomic); default stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="output format (default json)")
    p.add_argument("--threads", default=None, metavar="N",
                   help="worker threads, integer or 'auto' (default: "
                        "RANDCERT_THREADS or all cores)")


def _add_budget_flags(p):
    p.add_argument("--energy", type=float, help="energy uncertainty bound E")
    p.add_argument("--dt", type=float, default=1.0, help="trigger delay (default 1.0)")
    p.add_argument("--u", type=float, help="dimensionless budget E*dt; overrides --energy/--dt")


def _add_grid_flags(p, with_m=True):
    p.add_argument("-L", type=int, default=20, help="multiplier cube half-width (default 20)")
    if with_m:
        p.add_argument("-M", type=int, default=5, help="multiplier grid density (default 5)")
    p.add_argument("-N", type=int, default=5000, help="energy grid density (default 5000)")
    p.add_argument("-S", type=int, default=5000, help="boundary samples per arc (default 5000)")


def _resolve_threads(parser, args):
    raw = args.threads
    if raw is None:
        raw = os.environ.get("RANDCERT_THREADS")
    if raw is None or raw == "auto":
        return None
    try:
        n = int(raw)
    except ValueError:
        parser.error(f"--threads must be an integer or 'auto', got {raw!r}")
    if n < 1:
        parser.error("--threads must be >= 1")
    return n


def _resolve_budget(parser, args, required=True):
    """Return (energy, dt, u) with the invariant u == energy * dt."""
    if args.u is not None:
        if args.u < 0 or not math.isfinite(args.u):
            parser.error("--u must be finite and >= 0")
        return args.u, 1.0, args.u
    if args.energy is None:
        if required:
            parser.error("a budget is required: give --u or --energy (with optional --dt)")
        return None, args.dt, None
    if args.energy < 0 or args.dt <= 0:
        parser.error("--energy must be >= 0 and --dt > 0")
    return args.energy, args.dt, args.energy * args.dt


def _check_bias(parser, name, value):
    if value is None or not math.isfinite(value) or abs(value) > 1.0:
        parser.error(f"--{name} must be a bias in [-1, 1]")
    return value


def _params(parser, args, with_m=True):
    try:
        return DiscretizationParams(
            L=args.L, M=(args.M if with_m else 1), N=args.N, S=args.S
        )
    except ValueError as exc:
        parser.error(str(exc))


def _warn_trivial(u):
    if u > HALF_PI:
        sys.stderr.write(
            f"warning: u={u:g} > pi/2 is the trivial regime: every correlation "
            "is classically reachable and nothing can be certified\n"
        )


def _certificate_record(res, energy, dt, u, runtime_ms):
    return {
        "schema_version": "1",
        "input": {"c0": res.input[0].c0, "c1": res.input[0].c1,
                  "energy": energy, "dt": dt, "u": u},
        "params": {"L": res.params.L, "M": res.params.M,
                   "N": res.params.N, "S": res.params.S},
        "results": {
            "h_cert": res.h_cert,
            "h_dual_raw": res.h_dual_raw,
            "best_t": list(res.best_t),
            "classical_member": classical_contains(res.input[0], res.input[1]),
            "quantum_member": True,
        },
        "runtime_ms": runtime_ms,
    }


def _certificate_csv(rec):
    header = ["c0", "c1", "energy", "dt", "u", "L", "M", "N", "S",
              "h_cert", "h_dual_raw", "t1", "t2", "t3",
              "classical_member", "quantum_member", "runtime_ms"]
    i, p, r = rec["input"], rec["params"], rec["results"]
    row = [i["c0"], i["c1"], i["energy"], i["dt"], i["u"],
           p["L"], p["M"], p["N"], p["S"],
           r["h_cert"], r["h_dual_raw"],
           r["best_t"][0], r["best_t"][1], r["best_t"][2],
           r["classical_member"], r["quantum_member"], rec["runtime_ms"]]
    return to_csv(header, [row])


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def _cmd_certify(parser, args):
    c0 = _check_bias(parser, "c0", args.c0)
    c1 = _check_bias(parser, "c1", args.c1)
    energy, dt, u = _resolve_budget(parser, args)
    params = _params(parser, args)
    threads = _resolve_threads(parser, args)
    _warn_trivial(u)
    t0 = time.perf_counter()
    res = certify((c0, c1), u, params=params, threads=threads)
    rec = _certificate_record(res, energy, dt, u, int((time.perf_counter() - t0) * 1000))
    emit(to_json(rec) if args.format == "json" else _certificate_csv(rec), args.output)
    return EXIT_OK


def _cmd_sweep(parser, args):
    energy, dt, u = _resolve_budget(parser, args)
    if args.grid < 3 or args.grid % 2 == 0:
        parser.error("--grid must be an odd integer >= 3")
    params = _params(parser, args)
    threads = _resolve_threads(parser, args)
    _warn_trivial(u)
    sweep = diagonal_sweep(u, args.grid, params=params, threads=threads)
    rows = []
    for i in range(args.grid):
        for j in range(args.grid):
            v = sweep.values[i, j]
            rows.append([float(sweep.coords[i]), float(sweep.coords[j]),
                         None if np.isnan(v) else float(v)])
    emit(to_csv(["c0", "c1", "h_cert"], rows), args.output)
    return EXIT_OK


def _wedge_chains(u):
    """The classical wedge polygon as upper/lower vertex chains."""
    w = classical_wedge_width(u)
    upper = [(-1.0, -1.0), (-1.0, -1.0 + w), (1.0 - w, 1.0), (1.0, 1.0)]
    lower = [(-1.0, -1.0), (-1.0 + w, -1.0), (1.0, 1.0 - w), (1.0, 1.0)]
    dedup = lambda pts: [p for i, p in enumerate(pts) if i == 0 or p != pts[i - 1]]
    return dedup(upper), dedup(lower)


def _cmd_sets(parser, args):
    energy, dt, u = _resolve_budget(parser, args)
    if args.samples < 2:
        parser.error("--samples must be >= 2")
    _warn_trivial(u)
    ueff = min(u, HALF_PI)
    rows = []
    for cid, curve, lo, hi in (
        ("q1", BoundaryCurve.ONE, ueff, HALF_PI),
        ("q2", BoundaryCurve.TWO, 0.0, HALF_PI - ueff),
    ):
        for i in range(args.samples):
            s = lo + (hi - lo) * i / (args.samples - 1)
            c0, c1 = boundary_point(ueff, curve, s)
            rows.append([cid, s, c0, c1])
    upper, lower = _wedge_chains(u)
    for cid, chain in (("classical_upper", upper), ("classical_lower", lower)):
        for i, (c0, c1) in enumerate(chain):
            rows.append([cid, float(i), c0, c1])
    if args.format == "csv":
        emit(to_csv(["curve_id", "s", "c0", "c1"], rows), args.output)
    else:
        emit(to_json([
            {"curve_id": r[0], "s": r[1], "c0": r[2], "c1": r[3]} for r in rows
        ]), args.output)
    return EXIT_OK


def _cmd_coherent(parser, args):
    for name in ("xi", "omega_dt", "e_dt"):
        v = getattr(args, name)
        if v is None or not math.isfinite(v) or v < 0:
            parser.error(f"--{name.replace('_', '-')} must be finite and >= 0")
    point = CoherentPoint(args.xi, args.omega_dt, args.e_dt)
    threads = _resolve_threads(parser, args)
    if args.region:
        om = np.linspace(0.0, math.pi, args.omega_samples)
        ed = np.linspace(0.0, HALF_PI, args.e_samples)
        mask, line = region_mask(args.xi, om, ed)
        out = {
            "xi": args.xi,
            "omega_dt": [float(x) for x in om],
            "e_dt": [float(x) for x in ed],
            "certifiable": [[bool(v) for v in row] for row in mask],
            "budget_line_e_dt": [float(x) for x in line],
        }
        emit(to_json(out), args.output)
        return EXIT_OK
    c0, c1 = coherent_correlations(point)
    rec = {
        "input": {"xi": point.xi, "omega_dt": point.omega_dt, "e_dt": point.e_dt},
        "results": {
            "c0": c0,
            "c1": c1,
            "physical": point.is_physical,
            "nonzero_randomness": nonzero_randomness_condition(point),
            "wedge_threshold": 4.0 * point.e_dt / math.pi,
        },
    }
    if args.certify:
        params = _params(parser, args)
        t0 = time.perf_counter()
        res = certify((c0, c1), point.e_dt, params=params, threads=threads)
        rec["certificate"] = _certificate_record(
            res, point.e_dt, 1.0, point.e_dt, int((time.perf_counter() - t0) * 1000)
        )
    if args.format == "csv":
        r = rec["results"]
        header = ["xi", "omega_dt", "e_dt", "c0", "c1", "physical",
                  "nonzero_randomness", "wedge_threshold"]
        row = [point.xi, point.omega_dt, point.e_dt, r["c0"], r["c1"],
               r["physical"], r["nonzero_randomness"], r["wedge_threshold"]]
        if args.certify:
            header.append("h_cert")
            row.append(rec["certificate"]["results"]["h_cert"])
        emit(to_csv(header, [row]), args.output)
    else:
        emit(to_json(rec), args.output)
    return EXIT_OK


def _cmd_oracle(parser, args):
    c0 = _check_bias(parser, "c0", args.c0)
    c1 = _check_bias(parser, "c1", args.c1)
    energy, dt, u = _resolve_budget(parser, args)
    if args.pool < 5:
        parser.error("--pool must be >= 5")
    t0 = time.perf_counter()
    val, ens = best_feasible_ensemble((c0, c1), u, pool_size=args.pool, seed=args.seed)
    runtime_ms = int((time.perf_counter() - t0) * 1000)
    feasible = ens is not None
    rec = {
        "input": {"c0": c0, "c1": c1, "energy": energy, "dt": dt, "u": u},
        "pool_size": args.pool,
        "seed": args.seed,
        "results": {
            "upper_bound": val if feasible else None,
            "feasible": feasible,
            "ensemble": [
                {"weight": w, "c0": c.c0, "c1": c.c1, "u": b.u}
                for w, c, b in (ens.components if feasible else ())
            ],
        },
        "runtime_ms": runtime_ms,
    }
    if args.format == "csv":
        emit(to_csv(
            ["c0", "c1", "u", "pool_size", "seed", "upper_bound", "feasible"],
            [[c0, c1, u, args.pool, args.seed,
              val if feasible else None, feasible]],
        ), args.output)
    else:
        emit(to_json(rec), args.output)
    return EXIT_OK


def _cmd_eval_t(parser, args):
    c0 = _check_bias(parser, "c0", args.c0)
    c1 = _check_bias(parser, "c1", args.c1)
    energy, dt, u = _resolve_budget(parser, args)
    for name in ("t1", "t2", "t3"):
        v = getattr(args, name)
        if v is None or not math.isfinite(v):
            parser.error(f"--{name} must be a finite real")
    params = DiscretizationParams(L=args.L, M=1, N=args.N, S=args.S)
    threads = _resolve_threads(parser, args)
    t = (args.t1, args.t2, args.t3)
    t0 = time.perf_counter()
    inner = inner_min(t, params.L, params.N, params.S, threads=threads)
    value = dual_value(t, (c0, c1), u, params, _inner=inner)
    runtime_ms = int((time.perf_counter() - t0) * 1000)
    rec = {
        "t": [args.t1, args.t2, args.t3],
        "input": {"c0": c0, "c1": c1, "u": u},
        "params": {"L": args.L, "N": args.N, "S": args.S},
        "results": {
            "dual_value": value,
            "inner_min": inner,
            "energy_penalty": abs(args.t3) * (HALF_PI / (args.L * args.N)),
        },
        "runtime_ms": runtime_ms,
    }
    if args.format == "csv":
        emit(to_csv(
            ["t1", "t2", "t3", "c0", "c1", "u", "L", "N", "S", "dual_value"],
            [[args.t1, args.t2, args.t3, c0, c1, u, args.L, args.N, args.S, value]],
        ), args.output)
    else:
        emit(to_json(rec), args.output)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="randcert", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"randcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="certified entropy bound at one point")
    p.add_argument("--c0", type=float, required=True)
    p.add_argument("--c1", type=float, required=True)
    _add_budget_flags(p)
    _add_grid_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("sweep", help="certified bounds on a correlation grid (CSV)")
    _add_budget_flags(p)
    p.add_argument("--grid", type=int, required=True, help="odd grid size per axis")
    _add_grid_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("sets", help="quantum boundary and classical wedge polylines")
    _add_budget_flags(p)
    p.add_argument("--samples", type=int, required=True, help="samples per quantum arc")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_sets)

    p = sub.add_parser("coherent", help="coherent-state operating point")
    p.add_argument("--xi", type=float, required=True, help="coherent amplitude |alpha|")
    p.add_argument("--omega-dt", dest="omega_dt", type=float, required=True)
    p.add_argument("--e-dt", dest="e_dt", type=float, required=True)
    p.add_argument("--certify", action="store_true",
                   help="also run the dual certifier at (0, C1)")
    p.add_argument("--region", action="store_true",
                   help="emit the certifiable-region mask over (omega*dt, E*dt)")
    p.add_argument("--omega-samples", type=int, default=129)
    p.add_argument("--e-samples", type=int, default=65)
    _add_grid_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_coherent)

    p = sub.add_parser("oracle", help="primal upper bound from explicit ensembles")
    p.add_argument("--c0", type=float, required=True)
    p.add_argument("--c1", type=float, required=True)
    _add_budget_flags(p)
    p.add_argument("--pool", type=int, default=64, help="candidate pool size (default 64)")
    p.add_argument("--seed", type=int, default=0)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("eval-t", help="dual objective for a given multiplier vector")
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--t2", type=float, required=True)
    p.add_argument("--t3", type=float, required=True)
    p.add_argument("--c0", type=float, required=True)
    p.add_argument("--c1", type=float, required=True)
    _add_budget_flags(p)
    _add_grid_flags(p, with_m=False)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_eval_t)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except InfeasibleInputError as exc:
        sys.stderr.write(f"infeasible input: {exc}\n")
        return EXIT_INFEASIBLE
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
