"""Command line interface.

Subcommands: constants, solve, partition, verify, sliced, scaling.
All outputs are JSON or CSV; every invocation is deterministic for a
fixed --seed, independent of --threads. Exit code is nonzero when a bound
verification fails, unless --report-only is given.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import experiments
from .constants import extrinsic_constants, intrinsic_constants
from .geometry import sample_uniform
from .mk1d import EmpiricalMeasure
from .partition import Partition, verify_bound
from .sliced import error_certificate, sliced_mk_dense, sliced_mk_partition
from .transport import CostKind, DualWeights, SolveReport, mk_distance, solve_dual
from . import _kernels

_QUAD_SEED_OFFSET = 7919  # quadrature stream, distinct from the direction stream


def _dump_json(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    sys.stdout.write(text)


def cmd_constants(args) -> int:
    intr = intrinsic_constants(args.n, args.p)
    extr = extrinsic_constants(args.n, args.p)
    a_res = abs(intr.a_p - (
        (intr.I_p + 1) ** (-1.0 / args.p) - 1.0 / (intr.I_p + 1)) / 4.0)
    _dump_json({
        "intrinsic": intr.to_dict(),
        "extrinsic": extr.to_dict(),
        "residuals": {"a_p_defining": a_res, "b_p_defining": extr.residual},
    }, args.out)
    return 0


def _weights_payload(weights: DualWeights, report: SolveReport, args, quad_seed):
    return {
        "n": weights.n,
        "L": weights.L,
        "p": weights.cost.p,
        "cost_kind": weights.cost.kind,
        "seed": args.seed,
        "quad_seed": quad_seed,
        "quad_size": report.quadrature_size,
        "tol": args.tol,
        "directions": weights.directions.tolist(),
        "lambda": weights.lam.tolist(),
        "report": {
            **asdict(report),
            "mk_distance": mk_distance(report, weights.cost.p),
        },
    }


def cmd_solve(args) -> int:
    cost = CostKind(args.cost, args.p)
    directions = sample_uniform(args.n, args.L, args.seed).points
    quad_seed = args.seed + _QUAD_SEED_OFFSET
    quad = sample_uniform(args.n, args.quad, quad_seed)
    weights, report = solve_dual(directions, cost, quad, args.tol)
    _dump_json(_weights_payload(weights, report, args, quad_seed), args.out)
    return 0


def _load_partition(path) -> tuple[Partition, dict]:
    data = json.loads(Path(path).read_text())
    cost = CostKind(data["cost_kind"], data["p"])
    weights = DualWeights(
        np.asarray(data["directions"]), np.asarray(data["lambda"]), cost
    )
    quad = sample_uniform(data["n"], data["quad_size"], data["quad_seed"])
    idx, _ = _kernels.assign_points(
        quad.points, weights.directions, weights.lam, cost.p, cost.is_intrinsic
    )
    counts = np.bincount(idx, minlength=weights.L)
    rep = data["report"]
    report = SolveReport(
        iterations=rep["iterations"],
        max_mass_error=rep["max_mass_error"],
        dual_value=rep["dual_value"],
        transport_cost_p=rep["transport_cost_p"],
        quadrature_size=rep["quadrature_size"],
    )
    part = Partition(
        weights=weights, report=report, quad=quad, assignments=idx,
        cell_count=counts, cell_mass=counts / quad.count,
    )
    return part, data


def cmd_partition(args) -> int:
    part, data = _load_partition(args.weights)
    data["cell_count"] = part.cell_count.tolist()
    data["cell_mass"] = part.cell_mass.tolist()
    _dump_json(data, args.out)
    if args.points_csv:
        with open(args.points_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i}" for i in range(part.n)] + ["cell"])
            for row, cell in zip(part.quad.points, part.assignments):
                writer.writerow([repr(float(x)) for x in row] + [int(cell)])
    return 0


def cmd_verify(args) -> int:
    part, data = _load_partition(args.partition)
    cost = part.weights.cost
    if cost.is_intrinsic:
        consts = intrinsic_constants(part.n, cost.p)
    else:
        consts = extrinsic_constants(part.n, cost.p)
    mk = data["report"]["mk_distance"]
    bound = verify_bound(part, consts, mk)
    _dump_json({"bound_report": asdict(bound), "constants": consts.to_dict()},
               args.out)
    if not bound.satisfied_normalized and not args.report_only:
        return 1
    return 0


def cmd_sliced(args) -> int:
    mu1 = EmpiricalMeasure.from_csv(args.mu1)
    mu2 = EmpiricalMeasure.from_csv(args.mu2)
    q = math.inf if args.q in ("inf", "infinity") else float(args.q)
    part, data = _load_partition(args.partition)
    est = sliced_mk_partition(mu1, mu2, part, args.p, q)
    out = {
        "value": est.value,
        "p": args.p,
        "q": "inf" if math.isinf(q) else q,
        "L": est.L,
        "method": est.method,
    }
    if part.weights.cost.is_intrinsic:
        mk = data["report"]["mk_distance"]
        consts = intrinsic_constants(part.n, part.weights.cost.p)
        out["certificate"] = error_certificate(mu1, mu2, args.p, mk, consts)
        out["mk_direction_quality"] = mk
    if args.dense:
        dense = sliced_mk_dense(mu1, mu2, args.p, q, args.dense, args.seed)
        out["dense_value"] = dense.value
        out["dense_directions"] = args.dense
    if args.breakdown:
        out["per_direction"] = est.per_direction.tolist()
    _dump_json(out, args.out)
    return 0


def cmd_scaling(args) -> int:
    grid = [int(x) for x in args.grid.split(",")]
    run = experiments.scaling_experiment(
        args.n, args.p, grid, args.trials, args.quad, args.seed,
        cost_kind=CostKind(args.cost, args.p), tol=args.tol,
        threads=args.threads,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = experiments.report(
        run, out_dir / "scaling.csv", out_dir / "scaling_summary.json"
    )
    sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if not summary["slope_below_theory"] and not args.report_only:
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sphereot")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out-dir", default=".")
    parser.add_argument("--report-only", action="store_true",
                        help="exit 0 even when a bound verification fails")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print all explicit bound constants")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("solve", help="solve the semi-discrete dual")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--cost", choices=["extrinsic", "intrinsic"], required=True)
    p.add_argument("--quad", type=int, required=True)
    p.add_argument("--tol", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("partition", help="assign quadrature points to cells")
    p.add_argument("--weights", required=True)
    p.add_argument("--out")
    p.add_argument("--points-csv")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("verify", help="check the diameter bound")
    p.add_argument("--partition", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sliced", help="sliced distance via partition quadrature")
    p.add_argument("--mu1", required=True)
    p.add_argument("--mu2", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", required=True, help="q >= 1 or 'inf'")
    p.add_argument("--partition", required=True)
    p.add_argument("--dense", type=int, default=0,
                   help="also compute a dense MC reference with this many directions")
    p.add_argument("--breakdown", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sliced)

    p = sub.add_parser("scaling", help="max-diameter scaling experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--grid", default="8,16,32,64,128,256")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--quad", type=int, default=20000)
    p.add_argument("--cost", choices=["extrinsic", "intrinsic"],
                   default="intrinsic")
    p.add_argument("--tol", type=float, default=5e-3)
    p.set_defaults(func=cmd_scaling)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
