"""Command-line interface: analyze, design, simulate, calibrate, serve."""

from __future__ import annotations

import argparse
import os
import sys

from . import io as wio
from ._backend import set_num_threads
from .design import InfeasibleDesignError, describe, required_clusters
from .generative import estimate_design_inputs
from .simharness import run_grid
from .wincore import estimate


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="winclust",
        description="Win statistics for cluster-randomized trials: "
        "analysis, design, and simulation.",
    )
    p.add_argument("--threads", type=int, default=0, help="worker pool cap (0 = default)")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze a long-format dataset")
    a.add_argument("data", help="delimiter-separated long-format file")
    a.add_argument("--delimiter", default=",")
    a.add_argument("--id-col", default="id")
    a.add_argument("--trt-col", default="trt")
    a.add_argument("--cluster-col", default="cluster")
    a.add_argument("--outcome-col", default="outcome")
    a.add_argument("--tier-col", default="tier")
    a.add_argument("--test", choices=["z", "t"], default="z")
    a.add_argument("--alpha", type=float, default=0.05)
    a.add_argument(
        "--alternative",
        choices=["two.sided", "less", "greater"],
        default="two.sided",
    )
    a.add_argument(
        "--estimand",
        choices=["wd", "logwr", "logwo", "all"],
        default="all",
    )
    a.add_argument("--out", help="write the structured report (JSON) here")

    d = sub.add_parser("design", help="power / required clusters from a design document")
    d.add_argument("inputs", help="design-inputs JSON document")
    d.add_argument("--at-m", type=int, default=0, help="evaluate at this M instead of solving")
    d.add_argument("--out", help="write the result document here")

    s = sub.add_parser("simulate", help="run a scenario grid")
    s.add_argument("grid", help="scenario-grid JSON document")
    s.add_argument("--seed", type=int, default=None, help="override the grid seed")
    s.add_argument("--out", help="write the summary table (CSV) here")
    s.add_argument("--out-json", help="write full results (JSON) here")

    c = sub.add_parser("calibrate", help="derive design inputs from a generative spec")
    c.add_argument("spec", help="generative-spec JSON document")
    c.add_argument("--budget", type=int, default=100_000, help="Monte Carlo replications")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--high-precision", action="store_true")
    c.add_argument("--out", help="write the design-input estimate here")

    v = sub.add_parser("serve", help="start the planning HTTP service")
    v.add_argument("--host", default=os.environ.get("WINCLUST_HOST", "127.0.0.1"))
    v.add_argument(
        "--port", type=int, default=int(os.environ.get("WINCLUST_PORT", "8777"))
    )
    return p


def _cmd_analyze(args) -> int:
    data = wio.parse_long_format(
        args.data,
        delimiter=args.delimiter,
        columns={
            "id": args.id_col,
            "trt": args.trt_col,
            "cluster": args.cluster_col,
            "outcome": args.outcome_col,
            "tier": args.tier_col,
        },
    )
    est = estimate(data, alpha=args.alpha, alternative=args.alternative)
    report = wio.AnalysisReport(est, args.test, args.alpha, args.alternative)
    print(report.render_text(args.estimand))
    if args.out:
        wio.save_json(report.to_dict(), args.out)
    return 0


def _cmd_design(args) -> int:
    inputs = wio.design_inputs_from_dict(wio.load_json(args.inputs))
    if args.at_m:
        result = describe(inputs, args.at_m)
    else:
        result = required_clusters(inputs)
    doc = wio.design_result_doc(inputs, result)
    if result.required_M is not None:
        print(f"required clusters M = {result.required_M}")
    print(f"power = {result.power:.4f}  variance = {result.variance:.6g}")
    if args.out:
        wio.save_json(doc, args.out)
    return 0


def _cmd_simulate(args) -> int:
    grid = wio.grid_from_dict(wio.load_json(args.grid))
    if args.seed is not None:
        grid.seed = args.seed
    results = run_grid(grid)
    table = wio.results_table(results)
    print(table.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
    if args.out:
        table.to_csv(args.out, index=False)
    if args.out_json:
        wio.save_json({"results": [r.__dict__ for r in results]}, args.out_json)
    return 0


def _cmd_calibrate(args) -> int:
    spec = wio.spec_from_dict(wio.load_json(args.spec))
    est = estimate_design_inputs(
        spec, B=args.budget, seed=args.seed, high_precision=args.high_precision
    )
    doc = wio.estimate_doc(est)
    print(
        f"delta: wd={est.delta_wd:.4f} logwr={est.delta_logwr:.4f} "
        f"logwo={est.delta_logwo:.4f}"
    )
    print(f"pi_tie={est.pi_tie:.4f}  rank_icc={est.rank_icc:.4g}")
    print(
        f"p_w={est.p_w:.4f} p_t={est.p_t:.4f} p_ww={est.p_ww:.4f} "
        f"p_wt={est.p_wt:.4f} p_tt={est.p_tt:.4f}"
    )
    if args.out:
        wio.save_json(doc, args.out)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads:
        set_num_threads(args.threads)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "design":
            return _cmd_design(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "calibrate":
            return _cmd_calibrate(args)
        if args.command == "serve":
            return _cmd_serve(args)
        raise AssertionError(f"unhandled command {args.command}")
    except InfeasibleDesignError as exc:
        print(f"infeasible design: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
