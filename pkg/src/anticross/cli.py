"""Command-line front end: enumerate minima, analyze crossings, avoid them.

Reports are JSON with a versioned schema, numbers rounded to 12
significant digits, and fully deterministic byte output for a fixed seed.
Sweeps additionally produce a CSV trace, one row per (refined) grid point.

Exit codes: 0 ok, 2 usage or parse error, 3 eigensolver failure,
4 adjustment budget exhausted (report still written).
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import graph as graphmod
from .graph import Graph, GraphParseError, enumerate_maximal_independent_sets
from .model import AnnealInstance, DriverField, build_problem_hamiltonian
from .oracle import finite_difference_e2
from .perturb import (
    DegeneratePartnerWarning,
    minima_manifold,
    predict_crossing,
    predict_crossing_manifolds,
    second_order_nondegenerate,
)
from .spectrum import SolverConvergenceError, detect_anticrossing, min_gap, sweep
from .strategy import iterative_avoid, scale_c

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_BUDGET = 4


def _round12(x: float) -> float:
    return float(f"{x:.12g}")


def _clean(obj):
    """Recursively round floats so report bytes are reproducible."""
    if isinstance(obj, float):
        return _round12(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _mask_nodes(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _load_graph(args) -> tuple[Graph, str]:
    if args.gen is not None:
        kind, _, rest = args.gen.partition(":")
        params = tuple(float(p) if "." in p else int(p) for p in rest.split(",") if p) if rest else ()
        g = graphmod.generate_graph(kind, params, seed=args.seed)
        return g, "gen_" + args.gen.replace(":", "_").replace(",", "_").replace(".", "p")
    if args.instance is None:
        raise GraphParseError("no instance file or --gen spec supplied", 1)
    text = Path(args.instance).read_text(encoding="utf-8")
    return graphmod.parse_graph(text), Path(args.instance).stem


def _parse_delta(spec: str, n: int) -> DriverField:
    if spec.startswith("uniform:"):
        return DriverField.uniform(n, float(spec.split(":", 1)[1]))
    values = tuple(float(p) for p in spec.split(","))
    if len(values) != n:
        raise ValueError(f"expected {n} driver amplitudes, got {len(values)}")
    return DriverField(values)


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, points = spec.split(":")
        return np.geomspace(float(lo), float(hi), int(points))
    except ValueError:
        raise ValueError(f"grid spec must be lo:hi:points, got {spec!r}") from None


def _instance_section(g: Graph, c: float, driver: DriverField, source: str, seed: int) -> dict:
    return {
        "n": g.n,
        "edges": [list(e) for e in g.edges()],
        "c": c,
        "delta": list(driver.amplitudes),
        "source": source,
        "seed": seed,
    }


def cmd_enumerate(args) -> int:
    g, _ = _load_graph(args)
    catalog = enumerate_maximal_independent_sets(g)
    out = {
        "schema": 1,
        "n": g.n,
        "sets": [_mask_nodes(s) for s in catalog.sets],
        "sizes": list(catalog.sizes),
        "mis_size": catalog.mis_size,
        "degeneracy_classes": [[size, list(idx)] for size, idx in catalog.degeneracy_classes],
        "close_pairs": [list(p) for p in catalog.close_pairs],
    }
    sys.stdout.write(_dump_json(out))
    return EXIT_OK


def cmd_analyze(args) -> int:
    g, name = _load_graph(args)
    name = args.out or name
    c = args.c if args.c is not None else scale_c(g)
    if c <= 1:
        raise ValueError(f"penalty coefficient must exceed 1, got {c}")
    driver = _parse_delta(args.delta, g.n)
    inst = AnnealInstance(g, c, driver)
    catalog = enumerate_maximal_independent_sets(g)
    ising = build_problem_hamiltonian(g, c)

    minima = []
    for s, size in zip(catalog.sets, catalog.sizes):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DegeneratePartnerWarning)
            e2 = second_order_nondegenerate(g, c, driver.amplitudes, s)
        minima.append({
            "set": _mask_nodes(s),
            "size": size,
            "e2": e2,
            "degenerate_partner": any(
                issubclass(w.category, DegeneratePartnerWarning) for w in caught
            ),
        })

    mis_states = catalog.mis_states()
    predictions = []
    best = None
    for size, indices in catalog.degeneracy_classes:
        if size >= catalog.mis_size:
            continue
        manifold = minima_manifold(g, c, [catalog.sets[i] for i in indices])
        if len(mis_states) == 1:
            pred = predict_crossing(g, c, driver.amplitudes, mis_states[0], manifold)
            mode = "single global minimum"
        else:
            pred = predict_crossing_manifolds(
                g, c, driver.amplitudes, minima_manifold(g, c, mis_states), manifold
            )
            mode = "degenerate global minimum"
        predictions.append({
            "size": size,
            "states": [_mask_nodes(catalog.sets[i]) for i in indices],
            "restricted": True,
            "mode": mode,
            "delta_e0": pred.delta_e0,
            "delta_e2": pred.delta_e2,
            "lambda_star": pred.lambda_star,
            "within_radius": pred.within_radius,
        })
        if pred.lambda_star is not None and (best is None or pred.lambda_star < best.lambda_star):
            best = pred

    grid = _parse_grid(args.grid)
    trace = sweep(
        inst, grid, k=args.k,
        mis_states=mis_states, local_states=catalog.local_states(),
        seed=args.seed,
    )
    obs = detect_anticrossing(trace, inst, predicted=best, seed=args.seed)

    report = {
        "schema": 1,
        "instance": _instance_section(g, c, driver, name, args.seed),
        "ising": {
            "h": list(ising.h),
            "edges": [list(e) for e in ising.edges],
            "coupling": ising.coupling,
            "c": ising.c,
            "offset": ising.offset,
        },
        "catalog": {
            "sets": [_mask_nodes(s) for s in catalog.sets],
            "sizes": list(catalog.sizes),
            "mis_size": catalog.mis_size,
            "close_pairs": [list(p) for p in catalog.close_pairs],
        },
        "minima": minima,
        "predictions": predictions,
        "observation": {
            "g_min": obs.g_min,
            "lambda_min": obs.lambda_min,
            "swap": obs.swap,
            "swap_lambda": obs.swap_lambda,
            "predicted_lambda_star": obs.predicted_lambda_star,
            "prediction_agrees": obs.prediction_agrees,
        },
        "trace_csv": f"{name}.trace.csv",
    }
    if args.oracle:
        report["oracle"] = _oracle_section(inst, catalog, minima)

    _write_trace_csv(Path(f"{name}.trace.csv"), trace, args.k)
    Path(f"{name}.report.json").write_text(_dump_json(report), encoding="utf-8")
    sys.stdout.write(
        f"report: {name}.report.json  trace: {name}.trace.csv  "
        f"g_min={obs.g_min:.6g} at lambda={obs.lambda_min:.6g} swap={obs.swap}\n"
    )
    return EXIT_OK


def _oracle_section(inst, catalog, minima) -> dict:
    """Cross-check second-order values against the finite-difference oracle."""
    checks = []
    for entry, s in zip(minima, catalog.sets):
        fd = finite_difference_e2(inst, s)
        checks.append({
            "set": entry["set"],
            "e2_formula": entry["e2"],
            "e2_finite_difference": fd,
            "discrepancy": abs(fd - entry["e2"]),
        })
    return {"finite_difference_e2": checks}


def _write_trace_csv(path: Path, trace, k: int) -> None:
    header = "lambda," + ",".join(f"e{i}" for i in range(k)) + ",overlap_M,overlap_locals"
    lines = [header]
    for row in range(trace.lambdas.size):
        cells = [f"{trace.lambdas[row]:.11e}"]
        cells += [f"{trace.eigenvalues[row, i]:.11e}" for i in range(k)]
        cells.append(f"{trace.overlap_mis[row]:.11e}")
        cells.append(f"{trace.overlap_locals[row]:.11e}")
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_avoid(args) -> int:
    g, name = _load_graph(args)
    name = args.out or name
    c = args.c if args.c is not None else scale_c(g)
    if c <= 1:
        raise ValueError(f"penalty coefficient must exceed 1, got {c}")
    driver = _parse_delta(args.delta, g.n)
    inst = AnnealInstance(g, c, driver)
    grid = _parse_grid(args.grid)
    result = iterative_avoid(inst, budget=args.budget, lam_grid=grid, k=args.k, seed=args.seed)

    report = {
        "schema": 1,
        "instance": _instance_section(g, c, driver, name, args.seed),
        "rounds": [
            {
                "index": r.index,
                "delta": list(r.driver.amplitudes),
                "certificate": r.certificate,
                "g_min": r.observation.g_min,
                "lambda_min": r.observation.lambda_min,
                "swap": r.observation.swap,
                "swap_lambda": r.observation.swap_lambda,
                "visited_locals": [_mask_nodes(s) for s in r.visited_locals],
                "damped_nodes": _mask_nodes(r.damped_union),
            }
            for r in result.rounds
        ],
        "final": {
            "delta": list(result.outcome.driver.amplitudes),
            "certificate": result.outcome.certificate,
            "rationale": result.outcome.rationale,
            "swap": result.rounds[-1].observation.swap,
            "adjustments": result.adjustments,
            "success": result.success,
        },
    }
    Path(f"{name}.report.json").write_text(_dump_json(report), encoding="utf-8")
    sys.stdout.write(
        f"report: {name}.report.json  success={result.success} "
        f"adjustments={result.adjustments}\n"
    )
    return EXIT_OK if result.success else EXIT_BUDGET


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anticross",
        description="Predict and eliminate level crossings in transverse-field "
                    "anneals of maximum independent set instances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_sweep=True):
        p.add_argument("instance", nargs="?", help="instance file (see README for format)")
        p.add_argument("--gen", help="generator spec, e.g. split:7,2 or random_gnp:8,0.3")
        p.add_argument("--seed", type=int, default=0, help="seed for generators and solvers")
        if with_sweep:
            p.add_argument("--c", type=float, default=None, help="edge penalty (default: n)")
            p.add_argument("--delta", default="uniform:1",
                           help="driver amplitudes: 'uniform:x' or comma list")
            p.add_argument("--grid", default="0.01:1.0:64", help="sweep grid lo:hi:points")
            p.add_argument("--k", type=int, default=4, help="eigenvalues per grid point")
            p.add_argument("--out", default=None, help="output base name")

    p_enum = sub.add_parser("enumerate", help="list maximal independent sets")
    add_common(p_enum, with_sweep=False)
    p_enum.set_defaults(func=cmd_enumerate)

    p_analyze = sub.add_parser("analyze", help="predict and verify crossings")
    add_common(p_analyze)
    p_analyze.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
    p_analyze.set_defaults(func=cmd_analyze)

    p_avoid = sub.add_parser("avoid", help="iteratively damp visited local minima")
    add_common(p_avoid)
    p_avoid.add_argument("--budget", type=int, default=4, help="max damping rounds")
    p_avoid.set_defaults(func=cmd_avoid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GraphParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except SolverConvergenceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
