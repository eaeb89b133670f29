"""Command-line frontend: graph I/O, simulation, inverse solving, and mixing analysis.

All JSON output is emitted with sorted keys and default float repr, which
round-trips exactly; CSV rows carry 17 significant digits. Validation errors
exit with status 2 and a message on stderr. The environment variable CTQW_TOL
overrides the default analysis tolerances.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .analysis import (
    DEFAULT_SCAN_STEP,
    DEFAULT_SCAN_T_MAX,
    DEFAULT_SCAN_TOLERANCE,
    MixingReport,
    MixingTimeSet,
    average_mixing_bound,
    average_universal_verdict,
    complete_graph_uniform_condition,
    hypercube_mixing_times,
    product_uniform_mixing,
    uniform_mixing_scan,
)
from .graphs import FAMILIES, WeightedGraph, build_family, load_graph, multipartite_cells, scale_weights
from .solvers import collapse, solve_bipartite, solve_claw, solve_multipartite, solve_p3
from .spectral import DEFAULT_GROUPING_TOL, decompose
from .walk import (
    Distribution,
    average_distribution,
    evolve,
    instantaneous_distribution,
    trajectory,
)

_TARGET_SUM_TOL = 1e-9


def _env_tolerance(fallback: float) -> float:
    raw = os.environ.get("CTQW_TOL")
    if raw is None:
        return fallback
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f"CTQW_TOL is not a number: {raw!r}") from exc
    if not value > 0.0:
        raise ValueError(f"CTQW_TOL must be positive, got {value}")
    return value


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValueError(f"expected a comma-separated integer list, got {text!r}") from exc


def _add_graph_args(parser: argparse.ArgumentParser, prefix: str = "") -> None:
    dash = f"--{prefix}" if prefix else "--"
    parser.add_argument(f"{dash}graph", metavar="FILE", help="graph JSON file")
    parser.add_argument(f"{dash}family", choices=list(FAMILIES) + ["k2"], help="named family")
    parser.add_argument(f"{dash}n", type=int, help="family size parameter")
    parser.add_argument(f"{dash}parts", metavar="SIZES", help="comma-separated part sizes")
    parser.add_argument(f"{dash}connection-set", metavar="SHIFTS", help="circulant shifts")
    parser.add_argument(f"{dash}scale", type=float, default=1.0, help="multiply all edge weights")


def _graph_from_args(args: argparse.Namespace, prefix: str = "") -> WeightedGraph:
    get = lambda name: getattr(args, f"{prefix}{name}".replace("-", "_"))
    path, family = get("graph"), get("family")
    if (path is None) == (family is None):
        raise ValueError("exactly one graph source required: --graph FILE or --family NAME")
    if path is not None:
        graph, _ = load_graph(path)
    else:
        if family == "k2":
            graph = build_family("complete", n=2)
        else:
            parts = _parse_int_list(get("parts")) if get("parts") else None
            shifts = _parse_int_list(get("connection_set")) if get("connection_set") else None
            graph = build_family(family, n=get("n"), parts=parts, connection_set=shifts)
    scale = get("scale")
    if scale != 1.0:
        graph = scale_weights(graph, scale)
    return graph


def _parse_target(spec: str, n: int, seed: int) -> Distribution:
    if spec == "uniform":
        return Distribution.uniform(n)
    if spec == "random":
        rng = np.random.default_rng(seed)
        return Distribution(rng.dirichlet(np.ones(n)))
    if spec.startswith("point:"):
        vertex = int(spec.split(":", 1)[1])
        if not 0 <= vertex < n:
            raise ValueError(f"point target vertex {vertex} out of range")
        return Distribution.point(n, vertex)
    if os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = spec
    try:
        values = json.loads(text)
        if not isinstance(values, list):
            raise ValueError
    except ValueError:
        values = [float(part) for part in text.replace(",", " ").split()]
    arr = np.asarray(values, dtype=float)
    if arr.size != n:
        raise ValueError(f"target has {arr.size} entries, expected {n}")
    total = float(arr.sum())
    if abs(total - 1.0) > _TARGET_SUM_TOL:
        raise ValueError(f"target entries sum to {total}, not 1 within {_TARGET_SUM_TOL}")
    return Distribution(arr / total)


def _times_to_dict(times: MixingTimeSet | None) -> dict | None:
    if times is None:
        return None
    return {
        "progressions": [[o, p] for o, p in times.progressions],
        "times": list(times.times),
    }


def _report_to_dict(report: MixingReport) -> dict:
    return {
        "kind": report.kind,
        "start": report.start,
        "target": [float(x) for x in report.target.probs],
        "best_time": report.best_time,
        "best_distance": report.best_distance,
        "scan_window": None
        if report.scan_window is None
        else {"t_max": report.scan_window[0], "step": report.scan_window[1]},
        "feasible": report.feasible,
        "tolerance": report.tolerance,
        "times": _times_to_dict(report.times),
        "note": report.note,
    }


def _cmd_spectrum(args: argparse.Namespace) -> int:
    graph = _graph_from_args(args)
    d = decompose(graph, grouping_tol=args.grouping_tol)
    _emit(
        {
            "n": graph.n,
            "eigenvalues": [float(x) for x in d.distinct_eigenvalues()],
            "multiplicities": d.multiplicities(),
            "tau": d.spectral_type,
            "mu": d.max_multiplicity,
            "grouping_tolerance": d.grouping_tolerance,
        }
    )
    return 0


def _cmd_evolve(args: argparse.Namespace) -> int:
    graph = _graph_from_args(args)
    state = evolve(graph, args.start, args.t)
    _emit(
        {
            "n": graph.n,
            "start": args.start,
            "t": args.t,
            "distribution": [float(x) for x in instantaneous_distribution(state).probs],
            "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
        }
    )
    return 0


def _cmd_trajectory(args: argparse.Namespace) -> int:
    graph = _graph_from_args(args)
    rows = trajectory(graph, args.start, args.t_max, args.step)
    header = "t," + ",".join(f"p_{j}" for j in range(graph.n))
    print(header)
    for t, dist in rows:
        print(",".join(f"{value:.17g}" for value in (t, *dist.probs)))
    return 0


def _cmd_average(args: argparse.Namespace) -> int:
    graph = _graph_from_args(args)
    d = decompose(graph, grouping_tol=args.grouping_tol)
    dist = average_distribution(graph, args.start, decomposition=d)
    _emit(
        {
            "n": graph.n,
            "start": args.start,
            "average_distribution": [float(x) for x in dist.probs],
            "tau": d.spectral_type,
            "grouping_tolerance": d.grouping_tolerance,
        }
    )
    return 0


def _family_edge_set(family: str, parts: list[int]) -> list[tuple[int, int]]:
    if family == "p3":
        return [(0, 1), (1, 2)]
    if family == "claw":
        return [(0, k) for k in range(1, parts[0] + 1)]
    if family == "bipartite":
        m, n = parts
        return [(a, m + b) for a in range(m) for b in range(n)]
    cells = multipartite_cells(parts)
    edges = []
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            for a in cells[i]:
                for b in cells[j]:
                    edges.append((a, b))
    return sorted(edges)


def _cmd_solve(args: argparse.Namespace) -> int:
    family = args.family
    parts = _parse_int_list(args.parts) if args.parts else []
    if family == "p3":
        n_total, parts = 3, []
    elif family == "claw":
        if len(parts) != 1:
            raise ValueError("claw requires --parts LEAVES (one integer)")
        n_total = parts[0] + 1
    elif family == "bipartite":
        if len(parts) != 2:
            raise ValueError("bipartite requires --parts M,N")
        n_total = sum(parts)
    elif family == "multipartite":
        if len(parts) < 2:
            raise ValueError("multipartite requires --parts with at least two sizes")
        n_total = sum(parts)
    else:
        raise ValueError(f"unknown solve family {family!r}")

    target = _parse_target(args.target, n_total, args.seed)

    if family == "p3":
        solution = solve_p3(target, start=args.start if args.start in ("left", "middle") else int(args.start))
    elif family == "claw":
        start = args.start if args.start == "center" else int(args.start)
        solution = solve_claw(target, start=start)
    elif family == "bipartite":
        solution = solve_bipartite(parts[0], parts[1], target, start=int(args.start))
    else:
        solution = solve_multipartite(parts, target, start=int(args.start))

    achieved = instantaneous_distribution(evolve(solution.graph, solution.start, solution.t))
    _emit(
        {
            "family": family,
            "parts": parts,
            "n": n_total,
            "start": solution.start,
            "t": solution.t,
            "residual": solution.residual,
            "weights": [[j, k, solution.graph.weight(j, k)] for j, k in _family_edge_set(family, parts)],
            "target": [float(x) for x in target.probs],
            "achieved": [float(x) for x in achieved.probs],
        }
    )
    return 0


def _cmd_check_uniform(args: argparse.Namespace) -> int:
    graph = _graph_from_args(args)
    report = uniform_mixing_scan(
        graph,
        args.start,
        t_max=args.t_max,
        step=args.step,
        tolerance=args.tolerance,
        threads=args.threads or os.cpu_count(),
    )
    _emit(_report_to_dict(report))
    return 0


def _closed_form_times(args: argparse.Namespace, prefix: str) -> MixingTimeSet | None:
    get = lambda name: getattr(args, f"{prefix}{name}".replace("-", "_"))
    family, scale = get("family"), get("scale")
    if family == "hypercube":
        return hypercube_mixing_times(get("n"), edge_weight=scale)
    if family in ("complete", "k2"):
        size = 2 if family == "k2" else get("n")
        condition = complete_graph_uniform_condition(size)
        if not condition.feasible:
            return None
        progressions = tuple((o / scale, p / scale) for o, p in condition.times.progressions)
        return MixingTimeSet(progressions=progressions)
    return None


def _cmd_product_check(args: argparse.Namespace) -> int:
    g = _graph_from_args(args, prefix="g-")
    h = _graph_from_args(args, prefix="h-")

    def factor_times(graph: WeightedGraph, prefix: str, start: int) -> MixingTimeSet | None:
        closed = _closed_form_times(args, prefix)
        if closed is not None:
            return closed
        report = uniform_mixing_scan(
            graph,
            start,
            t_max=args.t_max,
            step=args.step,
            tolerance=args.tolerance,
            threads=args.threads or os.cpu_count(),
        )
        return report.times

    g_times = factor_times(g, "g-", args.start_g)
    h_times = factor_times(h, "h-", args.start_h)
    if g_times is None or h_times is None:
        report = MixingReport(
            kind="instantaneous",
            start=args.start_g * h.n + args.start_h,
            target=Distribution.uniform(g.n * h.n),
            best_time=None,
            best_distance=None,
            scan_window=None,
            feasible=False,
            tolerance=args.tolerance,
            note="a factor exposed no uniform mixing times; not established (not a disproof)",
        )
    else:
        report = product_uniform_mixing(
            g,
            h,
            g_times,
            h_times,
            start_g=args.start_g,
            start_h=args.start_h,
            tolerance=args.tolerance,
            t_max=args.t_max,
        )
    _emit(_report_to_dict(report))
    return 0


def _cmd_bound(args: argparse.Namespace) -> int:
    graph = _graph_from_args(args)
    d = decompose(graph)
    result = average_mixing_bound(graph, c=args.c, tolerance=args.tolerance, decomposition=d)
    payload = {
        "n": result.n,
        "tau": result.tau,
        "lower_bound": result.lower_bound,
        "start_averages": [float(x) for x in result.start_averages],
        "max_start_average": result.max_start_average,
        "min_start_average": result.min_start_average,
        "c": result.c,
        "almost_uniform_excluded": result.almost_uniform_excluded,
    }
    if args.target is not None:
        target = _parse_target(args.target, graph.n, args.seed)
        verdict = average_universal_verdict(graph, target, args.start, tolerance=args.tolerance, decomposition=d)
        payload["target_verdict"] = {
            "excluded": verdict.excluded,
            "start_probability": verdict.start_probability,
            "bound": verdict.bound,
            "tau": verdict.tau,
        }
    _emit(payload)
    return 0


def _cmd_collapse(args: argparse.Namespace) -> int:
    graph = _graph_from_args(args)
    if (args.cells is None) == (args.cell_vectors is None):
        raise ValueError("exactly one of --cells or --cell-vectors is required")
    if args.cells is not None:
        vectors = []
        for group in args.cells.split(";"):
            members = _parse_int_list(group)
            if not members:
                raise ValueError(f"empty cell in {args.cells!r}")
            vec = np.zeros(graph.n)
            vec[members] = 1.0 / math.sqrt(len(members))
            vectors.append(vec)
        cells = np.column_stack(vectors)
    else:
        with open(args.cell_vectors, "r", encoding="utf-8") as fh:
            cells = np.asarray(json.load(fh), dtype=float).T
    system = collapse(graph, cells)
    _emit(
        {
            "cells": [[float(x) for x in system.cell_vectors[:, c]] for c in range(system.cell_vectors.shape[1])],
            "reduced_hamiltonian": [[float(x) for x in row] for row in system.reduced_hamiltonian],
            "invariance_residual": system.invariance_residual,
            "exact": system.exact,
        }
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctqw",
        description="Continuous-time quantum walks on weighted graphs: spectra, evolution, inverse mixing design.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    scan_tol = _env_tolerance(DEFAULT_SCAN_TOLERANCE)
    strict_tol = _env_tolerance(1e-9)

    p = sub.add_parser("spectrum", help="eigenvalues, multiplicities, spectral type")
    _add_graph_args(p)
    p.add_argument("--grouping-tol", type=float, default=DEFAULT_GROUPING_TOL)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("evolve", help="walk state and distribution at one time")
    _add_graph_args(p)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("trajectory", help="CSV of distributions over a time grid")
    _add_graph_args(p)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.set_defaults(func=_cmd_trajectory)

    p = sub.add_parser("average", help="long-run time-averaged distribution")
    _add_graph_args(p)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--grouping-tol", type=float, default=DEFAULT_GROUPING_TOL)
    p.set_defaults(func=_cmd_average)

    p = sub.add_parser("solve", help="weights and time hitting a target distribution exactly")
    p.add_argument("--family", choices=["p3", "claw", "bipartite", "multipartite"], required=True)
    p.add_argument("--parts", help="comma-separated sizes (claw: leaf count)")
    p.add_argument("--target", required=True, help="uniform | point:V | random | inline list | file")
    p.add_argument("--start", default="0", help="vertex index, or left/middle (p3), center (claw)")
    p.add_argument("--seed", type=int, default=0, help="seed for --target random")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("check-uniform", help="scan the distance to uniform over a time window")
    _add_graph_args(p)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--t-max", type=float, default=DEFAULT_SCAN_T_MAX)
    p.add_argument("--step", type=float, default=DEFAULT_SCAN_STEP)
    p.add_argument("--tolerance", type=float, default=scan_tol)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=_cmd_check_uniform)

    p = sub.add_parser("product-check", help="uniform mixing of a Cartesian product at common factor times")
    _add_graph_args(p, prefix="g-")
    _add_graph_args(p, prefix="h-")
    p.add_argument("--start-g", type=int, default=0)
    p.add_argument("--start-h", type=int, default=0)
    p.add_argument("--t-max", type=float, default=50.0)
    p.add_argument("--step", type=float, default=DEFAULT_SCAN_STEP)
    p.add_argument("--tolerance", type=float, default=strict_tol)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=_cmd_product_check)

    p = sub.add_parser("bound", help="spectral-type floor on the average start probability")
    _add_graph_args(p)
    p.add_argument("--c", type=float, default=1.0, help="constant in the c/n almost-uniform test")
    p.add_argument("--tolerance", type=float, default=strict_tol)
    p.add_argument("--target", help="optionally test reachability of this average target")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("collapse", help="reduce the walk onto cell vectors")
    _add_graph_args(p)
    p.add_argument("--cells", help="semicolon-separated vertex groups, e.g. '1;0;2,3' (uniform cells)")
    p.add_argument("--cell-vectors", metavar="FILE", help="JSON list of explicit cell vectors")
    p.set_defaults(func=_cmd_collapse)

    return parser


def run(argv=None) -> int:
    try:
        parser = _build_parser()
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
