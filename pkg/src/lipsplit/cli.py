"""Batch command-line entry point.

Subcommands: ``run`` (one optimization or baseline run, trace + regret
report), ``sweep`` (regret table over horizons and dimensions with fitted
rates), ``validate`` (the full audit suite), and ``list-objectives``.
Exit codes: 0 success, 1 runtime or audit failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import baselines, objectives, optimizer, validation
from .regret import REPORT_FIELDS, RegretReport, fit_rate
from .trace import write_trace_csv, write_trace_json

__all__ = ["main"]


def _int_list(text: str) -> list[int]:
    items = [p for p in text.replace(" ", "").split(",") if p]
    if not items:
        raise ValueError("empty list")
    return [int(p) for p in items]


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _write_trace(trace, path: str, fmt: str, f_min) -> None:
    if fmt == "json":
        write_trace_json(trace, path, f_min)
    else:
        write_trace_csv(trace, path, f_min)


def _cmd_run(args) -> int:
    try:
        obj = objectives.parse_objective(args.objective)
    except ValueError as exc:
        return _usage_error(str(exc))

    if args.algo == "lipsplit":
        if args.T is None:
            return _usage_error("--T is required for the lipsplit algorithm")
    elif args.algo == "grid":
        if args.eps is None:
            return _usage_error("--eps is required for the grid algorithm")
    elif args.algo == "random":
        if args.T is None or args.seed is None:
            return _usage_error("--T and --seed are required for the random algorithm")

    try:
        if args.algo == "lipsplit":
            trace = optimizer.run(
                obj,
                args.T,
                L=args.L,
                prune=args.prune,
                gap_tol=args.gap_tol,
                engine=args.engine,
            )
        elif args.algo == "grid":
            trace = baselines.grid_search(obj, args.eps)
        else:
            trace = baselines.random_search(obj, args.T, args.seed)
        report = RegretReport.from_trace(trace, obj.f_min)
    except ValueError as exc:
        # bad numeric arguments (eps, T, L) are usage errors
        return _usage_error(str(exc))
    except Exception as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1

    summary = {
        "objective": obj.id,
        "algo": args.algo,
        "queries": len(trace),
        **report.to_dict(),
    }
    print(json.dumps(summary))
    if args.out:
        _write_trace(trace, args.out, args.format, obj.f_min)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    return 0


def _thread_cap(n_cells: int) -> int:
    env = os.environ.get("LIPSPLIT_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(n_cells, cap))


def _sweep_cell(spec: str, dim: int, T: int, prune: bool, engine: str) -> dict:
    obj = objectives.parse_objective(spec, dim_override=dim)
    trace = optimizer.run(obj, T, prune=prune, engine=engine)
    report = RegretReport.from_trace(trace, obj.f_min)
    return {"dim": dim, **report.to_dict()}


def _cmd_sweep(args) -> int:
    try:
        dims = _int_list(args.dims)
        horizons = _int_list(args.horizons)
    except ValueError as exc:
        return _usage_error(f"bad list argument: {exc}")
    if not horizons or not dims:
        return _usage_error("empty horizon or dimension list")
    try:
        objectives.parse_objective(args.objective, dim_override=dims[0])
    except ValueError as exc:
        return _usage_error(str(exc))

    cells = [(n, T) for n in dims for T in sorted(horizons)]
    try:
        workers = _thread_cap(len(cells))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {
                    cell: pool.submit(_sweep_cell, args.objective, cell[0], cell[1], args.prune, args.engine)
                    for cell in cells
                }
                rows = {cell: fut.result() for cell, fut in futures.items()}
        else:
            rows = {
                cell: _sweep_cell(args.objective, cell[0], cell[1], args.prune, args.engine)
                for cell in cells
            }
    except Exception as exc:
        print(f"sweep failed: {exc}", file=sys.stderr)
        return 1

    for n in dims:
        dim_rows = [rows[(n, T)] for T in sorted(horizons)]
        slope = None
        if len(dim_rows) >= 4:
            slope = fit_rate([(r["T"], r["average"]) for r in dim_rows])
        for r in dim_rows:
            r["slope"] = slope

    ordered = [rows[cell] for cell in cells]
    header = ["dim"] + REPORT_FIELDS
    lines = [",".join(header)]
    for r in ordered:
        lines.append(",".join("" if r[k] is None else repr(r[k]) if isinstance(r[k], float) else str(r[k]) for k in header))
    table = "\n".join(lines)
    print(table)
    if args.out:
        with open(args.out, "w") as fh:
            if args.format == "json":
                json.dump(ordered, fh, indent=2)
                fh.write("\n")
            else:
                fh.write(table + "\n")
    return 0


def _cmd_validate(args) -> int:
    try:
        dims = _int_list(args.dims)
    except ValueError as exc:
        return _usage_error(f"bad list argument: {exc}")
    report = validation.full_audit(
        dims=dims,
        score_T=args.T,
        score_m=args.m,
        partition_T=args.partition_T,
        sample_T=args.sample_T,
        reference_T=args.reference_T,
        prune_T=args.prune_T,
        score_bug=args.inject_score_bug,
    )
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return 0 if report["ok"] else 1


def _cmd_list_objectives(_args) -> int:
    for name, doc in objectives.OBJECTIVES.items():
        print(f"{name}: {doc}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lipsplit",
        description="Global optimization of Lipschitz functions by best-first bisection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one algorithm on one objective")
    p_run.add_argument("--objective", required=True, help="e.g. cone:dim=2,L=1,center=0.3;0.7")
    p_run.add_argument("--algo", choices=["lipsplit", "grid", "random"], default="lipsplit")
    p_run.add_argument("--T", type=int, help="number of queries (lipsplit, random)")
    p_run.add_argument("--L", type=float, help="Lipschitz constant override (default: exact)")
    p_run.add_argument("--eps", type=float, help="grid half cell side (grid)")
    p_run.add_argument("--seed", type=int, help="seed (random)")
    p_run.add_argument("--prune", action="store_true", help="drop candidates that cannot beat the incumbent")
    p_run.add_argument("--gap-tol", type=float, default=None, help="stop early at this certified optimality gap")
    p_run.add_argument("--engine", choices=["auto", "python", "compiled"], default="auto")
    p_run.add_argument("--out", help="write the query trace to this path")
    p_run.add_argument("--report", help="write the regret report JSON to this path")
    p_run.add_argument("--format", choices=["csv", "json"], default="csv")
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="regret table over horizons and dimensions")
    p_sweep.add_argument("--objective", required=True, help="objective family; dim is injected per cell")
    p_sweep.add_argument("--dims", default="1", help="comma-separated dimensions")
    p_sweep.add_argument("--horizons", required=True, help="comma-separated horizons (geometric for rate fits)")
    p_sweep.add_argument("--prune", action="store_true")
    p_sweep.add_argument("--engine", choices=["auto", "python", "compiled"], default="auto")
    p_sweep.add_argument("--out", help="write the table to this path")
    p_sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_val = sub.add_parser("validate", help="run the full audit suite")
    p_val.add_argument("--dims", default="1,2,3")
    p_val.add_argument("--T", type=int, default=50, help="score-audit horizon")
    p_val.add_argument("--m", type=int, default=101, help="oracle lattice points per axis")
    p_val.add_argument("--partition-T", type=int, default=100)
    p_val.add_argument("--sample-T", type=int, default=1000)
    p_val.add_argument("--reference-T", type=int, default=200)
    p_val.add_argument("--prune-T", type=int, default=100)
    p_val.add_argument(
        "--inject-score-bug",
        action="store_true",
        help="corrupt the scoring rule to verify the audit catches violations",
    )
    p_val.add_argument("--out", help="write the JSON report to this path")
    p_val.set_defaults(fn=_cmd_validate)

    p_list = sub.add_parser("list-objectives", help="show the objective registry")
    p_list.set_defaults(fn=_cmd_list_objectives)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
