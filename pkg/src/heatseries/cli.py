"""Command-line front door.

Subcommands: laplacian, solve, backward, radius, counterexample, verify.
Reports are deterministic JSON (canonical 17-significant-digit floats) with
an optional lossy CSV projection for plotting; every report embeds the
resolved configuration and arithmetic mode.  Exit status: 0 when all
invoked audits pass, 1 on audit failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import bounds as bounds_mod
from . import counterexample as cx
from .errors import HeatSeriesError
from .graphs import (
    LocalFunction,
    complete_graph,
    cycle_graph,
    family_from_spec,
    integer_segment,
    load_graph,
    path_graph,
    random_weighted_graph,
)
from .laplacian import IteratedLaplacianTable, apply_laplacian, iterated_laplacian
from .oracle import brute_iterate, dense_laplacian, expm_apply
from .series import (
    SeriesSolution,
    check_backward_solvability,
    coefficient_bound_audit,
    series_eval,
)

USAGE_ERROR = 2
AUDIT_FAILURE = 1


# -- canonical serialization -------------------------------------------------

def _fmt_float(x):
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        return '"nan"'
    return format(x, ".17g")


def _canonical(obj, out):
    if obj is None:
        out.write("null")
    elif obj is True:
        out.write("true")
    elif obj is False:
        out.write("false")
    elif isinstance(obj, int):
        out.write(str(obj))
    elif isinstance(obj, float):
        out.write(_fmt_float(obj))
    elif isinstance(obj, Fraction):
        out.write(json.dumps(str(obj)))
    elif isinstance(obj, str):
        out.write(json.dumps(obj))
    elif isinstance(obj, (list, tuple)):
        out.write("[")
        for i, item in enumerate(obj):
            if i:
                out.write(", ")
            _canonical(item, out)
        out.write("]")
    elif isinstance(obj, dict):
        out.write("{")
        for i, (key, val) in enumerate(obj.items()):
            if i:
                out.write(", ")
            out.write(json.dumps(str(key)))
            out.write(": ")
            _canonical(val, out)
        out.write("}")
    else:
        out.write(json.dumps(str(obj)))


def canonical_json(obj):
    buf = io.StringIO()
    _canonical(obj, buf)
    buf.write("\n")
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return v


def _vertex_key(x):
    return repr(x)


def _jsonable_vertex(x):
    return list(x) if isinstance(x, tuple) else x


# -- argument plumbing -------------------------------------------------------

def _add_common(parser):
    src = parser.add_mutually_exclusive_group()
    src.add_argument("--graph", metavar="FILE", help="finite graph JSON document")
    src.add_argument(
        "--family",
        metavar="SPEC",
        help="lazy family: z, lattice:<d> or tree:<k> (default z)",
    )
    parser.add_argument("--exact", action="store_true",
                        help="parse numeric inputs as exact rationals")
    parser.add_argument("--out", metavar="FILE", help="report file (default stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")


def _add_initial(parser):
    parser.add_argument(
        "--initial",
        metavar="FILE",
        help="initial data as JSON [[vertex, value], ...] (default: 1 at the root)",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="heat-series",
        description="Series solvers and audits for the heat equation on weighted graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("laplacian", help="apply the Laplacian iterates and dump values")
    _add_common(p)
    _add_initial(p)
    p.add_argument("--kmax", type=int, default=5)

    p = sub.add_parser("solve", help="evaluate the series over a vertex/time grid")
    _add_common(p)
    _add_initial(p)
    p.add_argument("--t", default="-0.1", help="comma-separated evaluation times")
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--rmax", type=int, default=3, help="vertex window radius")

    p = sub.add_parser("backward", help="backward Cauchy values plus solvability audit")
    _add_common(p)
    _add_initial(p)
    p.add_argument("--t", default="0.1", help="comma-separated nonnegative times")
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--kmax", type=int, default=15)
    p.add_argument("--rmax", type=int, default=3)
    p.add_argument("--degree-bound", type=float, default=None,
                   help="assumed degree cap (default: audited maximum)")

    p = sub.add_parser("radius", help="fit envelopes, certify the radius, tabulate remainders")
    _add_common(p)
    _add_initial(p)
    p.add_argument("--rmax", type=int, default=8, help="fit window radius")
    p.add_argument("--kmax", type=int, default=40, help="remainder table length")
    p.add_argument("--amplitude", type=float, default=None,
                   help="growth envelope amplitude (skips fitting)")
    p.add_argument("--rate", type=float, default=0.0,
                   help="growth envelope exponent rate (with --amplitude)")
    p.add_argument("--deg-cap", type=float, default=None,
                   help="degree envelope cap (skips fitting)")
    p.add_argument("--deg-power", type=float, default=0.0,
                   help="degree envelope power (with --deg-cap)")
    p.add_argument("--delta", type=float, default=None,
                   help="time window half-width for the remainder table")

    p = sub.add_parser("counterexample", help="run the flat-bump sharpness audits")
    _add_common(p)
    p.add_argument("--beta", type=int, default=4)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--T", type=float, default=1.0, dest="time_shift")
    p.add_argument("--xmax", type=int, default=60, help="growth audit window end")
    p.add_argument("--kmax", type=int, default=10, help="flatness derivative orders")
    p.add_argument("--tol", type=float, default=1e-8, help="flatness tolerance")

    p = sub.add_parser("verify", help="oracle cross-check suite on the fixture set")
    _add_common(p)
    p.add_argument("--tol", type=float, default=1e-11)
    return parser


def _resolve_graph(args):
    if args.graph:
        return load_graph(Path(args.graph), exact=args.exact), {"graph": args.graph}
    family = args.family or "z"
    return family_from_spec(family), {"family": family}


def _parse_vertex(v):
    return tuple(_parse_vertex(c) for c in v) if isinstance(v, list) else v


def _resolve_initial(args, graph):
    if getattr(args, "initial", None):
        parse_float = Fraction if args.exact else float
        doc = json.loads(Path(args.initial).read_text(), parse_float=parse_float)
        values = {}
        for rec in doc:
            if not isinstance(rec, list) or len(rec) != 2:
                raise HeatSeriesError(f"malformed initial-data record {rec!r}")
            x = _parse_vertex(rec[0])
            graph.check_vertex(x)
            values[x] = rec[1]
        return LocalFunction(values), {"initial": args.initial}
    return LocalFunction.delta(graph.root), {"initial": "delta-at-root"}


def _parse_times(spec, exact):
    out = []
    for chunk in str(spec).split(","):
        chunk = chunk.strip()
        if chunk:
            out.append(Fraction(chunk) if exact else float(chunk))
    if not out:
        raise HeatSeriesError("no evaluation times given")
    return out


def _worker_count():
    try:
        return max(1, int(os.environ.get("HEAT_SERIES_THREADS", "1")))
    except ValueError:
        return 1


def _grid_eval(solution, tasks):
    workers = _worker_count()
    if workers == 1:
        return [series_eval(solution, x, t) for x, t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda xt: series_eval(solution, *xt), tasks))


def _eval_rows(solution, vertices, times):
    tasks = [(x, t) for x in vertices for t in times]
    results = _grid_eval(solution, tasks)
    rows = []
    for (x, t), res in zip(tasks, results):
        rows.append(
            {
                "vertex": _jsonable_vertex(x),
                "t": float(t),
                "value": float(res.value),
                "tail_bound": res.tail_bound,
                "K_used": res.terms_used,
            }
        )
    return rows


# -- subcommands -------------------------------------------------------------

def _cmd_laplacian(args, config):
    graph, src = _resolve_graph(args)
    initial, init_src = _resolve_initial(args, graph)
    config.update(src)
    config.update(init_src)
    config["kmax"] = args.kmax
    table = IteratedLaplacianTable(graph, initial)
    rows = []
    for k in range(args.kmax + 1):
        entry = table.entry(k)
        for x in sorted(entry.support, key=_vertex_key):
            rows.append(
                {"k": k, "vertex": _jsonable_vertex(x), "value": float(entry(x))}
            )
    return {"values": rows}, True, rows


def _cmd_solve(args, config):
    graph, src = _resolve_graph(args)
    initial, init_src = _resolve_initial(args, graph)
    times = _parse_times(args.t, args.exact)
    config.update(src)
    config.update(init_src)
    config.update({"t": [float(t) for t in times], "tol": args.tol, "rmax": args.rmax})
    solution = SeriesSolution(graph, initial, tol=args.tol)
    vertices = sorted(graph.ball(graph.root, args.rmax), key=_vertex_key)
    rows = _eval_rows(solution, vertices, times)
    return {"evaluations": rows}, True, rows


def _cmd_backward(args, config):
    graph, src = _resolve_graph(args)
    initial, init_src = _resolve_initial(args, graph)
    times = _parse_times(args.t, args.exact)
    if any(t < 0 for t in times):
        raise HeatSeriesError("backward times must be nonnegative")
    config.update(src)
    config.update(init_src)
    config.update(
        {
            "t": [float(t) for t in times],
            "tol": args.tol,
            "kmax": args.kmax,
            "rmax": args.rmax,
        }
    )
    solution = SeriesSolution(graph, initial, tol=args.tol)
    vertices = sorted(graph.ball(graph.root, args.rmax), key=_vertex_key)
    rows = _eval_rows(solution, vertices, [-t for t in times])
    for row, (_x, t) in zip(rows, [(x, t) for x in vertices for t in times]):
        row["t"] = float(t)  # report the backward time, not the internal negation

    if args.degree_bound is None:
        region = set(graph.ball(graph.root, args.rmax))
        spread = set(initial.support)
        for _ in range(args.kmax):
            spread = set(graph.one_neighborhood(spread))
        cap = max(float(graph.deg(x)) for x in region | spread)
    else:
        cap = args.degree_bound
    config["degree_bound"] = cap
    audit = check_backward_solvability(graph, initial, cap, args.kmax, args.rmax)
    report = {
        "evaluations": rows,
        "solvability": {
            "verdict": audit.verdict,
            "scale": audit.scale,
            "rate": audit.rate,
            "witnesses": [
                {
                    "k": k,
                    "vertex": _jsonable_vertex(x),
                    "value": v,
                    "bound": b,
                }
                for k, x, v, b in audit.witnesses
            ],
            "note": audit.note,
        },
    }
    return report, audit.certified, rows


def _cmd_radius(args, config):
    graph, src = _resolve_graph(args)
    initial, init_src = _resolve_initial(args, graph)
    config.update(src)
    config.update(init_src)
    config.update({"rmax": args.rmax, "kmax": args.kmax})
    if args.amplitude is not None:
        config.update({"amplitude": args.amplitude, "rate": args.rate})
    if args.deg_cap is not None:
        config.update({"deg_cap": args.deg_cap, "deg_power": args.deg_power})

    if args.amplitude is not None:
        profile = bounds_mod.GrowthProfile(args.amplitude, args.rate)
        profile_src = "explicit"
    else:
        profile = bounds_mod.fit_growth_profile(graph, initial, max(2, args.rmax))
        profile_src = "fitted"
    if args.deg_cap is not None:
        growth = bounds_mod.DegreeGrowth(args.deg_cap, args.deg_power)
        growth_src = "explicit"
    else:
        growth = bounds_mod.fit_degree_growth(graph, max(1, args.rmax))
        growth_src = "fitted"

    cert = bounds_mod.radius_estimate(profile, growth)
    delta = args.delta
    if delta is None:
        if cert.kind == bounds_mod.FINITE_LOWER_BOUND:
            delta = cert.radius / 2.0
        else:
            delta = 0.9 / (2.0 * math.e * float(growth.cap))
    config["delta"] = delta

    table_rows = []
    if cert.kind != bounds_mod.OUT_OF_HYPOTHESIS:
        big_r = max(1, args.rmax)
        for k in range(1, args.kmax + 1):
            table_rows.append(
                {"k": k, "Q": bounds_mod.remainder_bound(k, delta, growth, profile, big_r)}
            )
    report = {
        "profile": {
            "amplitude": float(profile.amplitude),
            "rate": float(profile.rate),
            "source": profile_src,
            "grid": list(bounds_mod.EXPONENT_GRID),
        },
        "degree_growth": {
            "cap": float(growth.cap),
            "power": float(growth.power),
            "source": growth_src,
        },
        "certificate": {
            "kind": cert.kind,
            "radius": float(cert.radius) if cert.radius is not None else None,
            "slack": float(cert.slack),
        },
        "remainder_table": table_rows,
    }
    return report, True, table_rows


def _cmd_counterexample(args, config):
    params = cx.FlatBumpParams(
        beta=args.beta,
        theta=args.theta,
        epsilon=args.epsilon,
        time_shift=args.time_shift,
    )
    config.update(
        {
            "beta": params.beta,
            "theta": params.theta,
            "epsilon": params.epsilon,
            "T": params.time_shift,
            "xmax": args.xmax,
            "kmax": args.kmax,
            "tol": args.tol,
        }
    )
    t_grid = (Fraction(1, 4), Fraction(1, 2), Fraction(1, 1))
    xs = range(-10, 11)
    residual_rows = []
    max_residual = 0.0
    max_value = 0.0
    for x in xs:
        for t in t_grid:
            r = abs(cx.heat_residual_1d(params, x, t))
            v = abs(cx.v_eval(params, x, t))
            max_residual = max(max_residual, r)
            max_value = max(max_value, v)
            residual_rows.append({"x": x, "t": float(t), "residual": r})
    zero_poly = all(cx.heat_residual_poly(params, x) == {} for x in xs)

    growth = cx.growth_audit(params, xmax=args.xmax)
    huang = [cx.huang_bound_audit(params, k, t_grid) for k in range(1, 21)]
    witnesses = [
        cx.non_analyticity_witness(params, x, args.kmax, tol=args.tol)
        for x in (0, 1, 2, 3)
    ]

    flatness_table = [
        {
            "x": w.x,
            "smallest_s": w.smallest_s,
            "values": {str(j): v for j, v in w.flat_values.items()},
            "flat": w.flat,
        }
        for w in witnesses
    ]
    residual_ok = max_residual <= 1e-9 * max(max_value, 1e-300)
    conclusion = (
        zero_poly
        and residual_ok
        and growth.passed
        and all(w.not_analytic for w in witnesses)
    )
    report = {
        "params": {
            "beta": params.beta,
            "theta": params.theta,
            "epsilon": params.epsilon,
            "T": params.time_shift,
        },
        "grid": {"x": [min(xs), max(xs)], "t": [float(t) for t in t_grid]},
        "max_residual": max_residual,
        "max_value": max_value,
        "residual_poly_zero": zero_poly,
        "growth_pass": growth.passed,
        "growth": {
            "r0": growth.r0,
            "window": list(growth.window),
            "worst_margin": growth.worst_margin,
            "violations": growth.violations,
        },
        "huang_findings": [
            {"k": h.k, "bound": h.bound, "findings": h.findings}
            for h in huang
            if h.findings
        ],
        "flatness_table": flatness_table,
        "positivity": [
            {"x": w.x, "samples": w.positive_samples} for w in witnesses
        ],
        "conclusion": {
            "not_time_analytic": conclusion,
            "statement": (
                "every probed Taylor coefficient at the shifted origin "
                "vanishes while the solution is positive later, so the "
                "series cannot represent the solution there"
            ),
        },
    }
    return report, conclusion, residual_rows


def _verify_fixtures():
    yield "K2", complete_graph(2)
    yield "P10", path_graph(10)
    yield "C30", cycle_graph(30)
    yield "random20", random_weighted_graph(20, seed=7)
    yield "zseg15", integer_segment(15)


def _cmd_verify(args, config):
    config["tol"] = args.tol
    checks = []
    ok_all = True
    for name, graph in _verify_fixtures():
        initial = LocalFunction.delta(graph.root)
        solution = SeriesSolution(graph, initial, tol=args.tol)
        op = dense_laplacian(graph)
        vec = op.vector_of(initial)

        for t in (-0.1, -0.05, -0.01):
            ref = expm_apply(op, vec, t)
            err = 0.0
            tail_ok = True
            for x in graph.vertices():
                res = series_eval(solution, x, t)
                diff = abs(float(res.value) - float(ref[op.index[x]]))
                err = max(err, diff)
                if diff > res.tail_bound + 1e-12:
                    tail_ok = False
            passed = err <= 1e-10 and tail_ok
            ok_all &= passed
            checks.append(
                {
                    "graph": name,
                    "check": f"series-vs-expm@t={format(t, '.17g')}",
                    "max_err": err,
                    "threshold": 1e-10,
                    "pass": passed,
                }
            )

        err = 0.0
        for k in range(0, 9):
            ref = brute_iterate(op, vec, k)
            # iterate magnitudes grow like (2D)^k; compare on that scale
            scale = max(1.0, max(abs(float(v)) for v in ref))
            mine = iterated_laplacian(graph, initial, k)
            err = max(
                err,
                max(
                    abs(float(mine(x)) - float(ref[op.index[x]])) / scale
                    for x in graph.vertices()
                ),
            )
        passed = err <= 1e-10
        ok_all &= passed
        checks.append(
            {
                "graph": name,
                "check": "iterates-vs-dense@k<=8",
                "max_err": err,
                "threshold": 1e-10,
                "pass": passed,
            }
        )

        lap = apply_laplacian(graph, initial)
        total = sum(graph.measure(x) * lap(x) for x in lap.support)
        passed = abs(float(total)) <= 1e-12
        ok_all &= passed
        checks.append(
            {
                "graph": name,
                "check": "conservation",
                "max_err": abs(float(total)),
                "threshold": 1e-12,
                "pass": passed,
            }
        )
    return {"checks": checks}, ok_all, checks


_DISPATCH = {
    "laplacian": _cmd_laplacian,
    "solve": _cmd_solve,
    "backward": _cmd_backward,
    "radius": _cmd_radius,
    "counterexample": _cmd_counterexample,
    "verify": _cmd_verify,
}

_CSV_FIELDS = {
    "laplacian": ("k", "vertex", "value"),
    "solve": ("vertex", "t", "value", "tail_bound", "K_used"),
    "backward": ("vertex", "t", "value", "tail_bound", "K_used"),
    "radius": ("k", "Q"),
    "counterexample": ("x", "t", "residual"),
    "verify": ("graph", "check", "max_err", "threshold", "pass"),
}


def _write_report(args, command, config, body, passed, rows):
    report = {
        "command": command,
        "config": config,
        "arithmetic": "exact" if getattr(args, "exact", False) else "float64",
        "results": body,
        "pass": passed,
    }
    if args.format == "json":
        text = canonical_json(report)
    else:
        fields = _CSV_FIELDS[command]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_csv_cell(row.get(f)) for f in fields])
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {"command": args.command, "format": args.format}
    try:
        body, passed, rows = _DISPATCH[args.command](args, config)
    except HeatSeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    _write_report(args, args.command, config, body, passed, rows)
    return 0 if passed else AUDIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
