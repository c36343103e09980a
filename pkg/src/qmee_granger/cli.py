"""Command line interface: ``qmee-granger {analyze,simulate,bench}``."""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .causality import BIC_VARIANTS, GcaConfig, analyze_channels
from .entropy import INIT_RULES, CriterionConfig
from .exceptions import GrangerError
from .experiments import (
    DEFAULT_ALPHA_GRID,
    ExperimentSpec,
    loglog_slope,
    run_experiment,
    rvr_max,
)
from .io import emit_report, parse_csv

logger = logging.getLogger("qmee_granger")

DEFAULT_SEED = 0


def _add_criterion_flags(p, epsilon, iters):
    p.add_argument("--sigma", type=float, default=0.5,
                   help="kernel bandwidth (default: %(default)s)")
    p.add_argument("--epsilon", type=float, default=epsilon,
                   help="quantization threshold; 0 makes QMEE coincide with MEE (default: %(default)s)")
    p.add_argument("--iters", type=int, default=iters,
                   help="maximum fixed-point iterations K (default: %(default)s)")
    p.add_argument("--tol", type=float, default=1e-8,
                   help="stop when the weight increment norm is below this; 0 always runs "
                        "--iters iterations (default: %(default)s)")
    p.add_argument("--ridge", type=float, default=None,
                   help="ridge for singular normal equations (default: 1e-10*trace/d)")
    p.add_argument("--init", choices=INIT_RULES, default="best",
                   help="fixed-point start: least squares, zero, or whichever of the two has "
                        "the larger information potential (default: %(default)s)")


def _add_order_flags(p, pmax):
    p.add_argument("--pmax", type=int, default=pmax,
                   help="largest candidate model order for BIC (default: %(default)s)")
    p.add_argument("--order", type=int, default=None,
                   help="fix every model order instead of BIC selection")
    p.add_argument("--bic-variant", choices=BIC_VARIANTS, default="potential_based",
                   help="BIC fit term: N*H2 (potential_based) or N*log(H2) (literal) "
                        "(default: %(default)s)")
    p.add_argument("--common-order", action="store_true",
                   help="refit the four models of a pair at their largest selected order")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qmee-granger",
        description="Granger causality with MSE, MEE and quantized-MEE model fitting.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="pairwise causality among the columns of a CSV file")
    pa.add_argument("--input", required=True, help="CSV file: header of names, numeric rows")
    pa.add_argument("--output", default=None,
                    help="report path; .csv selects CSV output (default: JSON to stdout)")
    pa.add_argument("--format", choices=("json", "csv"), default=None,
                    help="report format (default: from --output suffix, else json)")
    pa.add_argument("--criterion", choices=("mse", "mee", "qmee"), default="qmee",
                    help="fitting criterion (default: %(default)s)")
    _add_criterion_flags(pa, epsilon=0.05, iters=100)
    _add_order_flags(pa, pmax=20)
    pa.add_argument("--center", action="store_true",
                    help="subtract each channel's mean before embedding")
    pa.add_argument("--seed", type=int, default=DEFAULT_SEED,
                    help="accepted for uniformity; analysis is deterministic")
    pa.add_argument("--jobs", type=int, default=None, help="parallel workers for pairs")

    ps = sub.add_parser("simulate", help="Monte-Carlo reproduction of the synthetic benchmarks")
    ps.add_argument("--experiment", choices=("table1", "table2", "fig2"), required=True)
    ps.add_argument("--case", default="all",
                    help="noise case 1, 2, 3 or 'all' (table1/table2; default: %(default)s)")
    ps.add_argument("--runs", type=int, default=None,
                    help="Monte-Carlo runs (default: 100; 50 per alpha for fig2)")
    ps.add_argument("--seed", type=int, default=DEFAULT_SEED,
                    help="base seed; run k uses seed+k (default: %(default)s)")
    ps.add_argument("--criteria", default="mse,mee,qmee",
                    help="comma separated criteria (default: %(default)s)")
    ps.add_argument("--n", type=int, default=500, help="samples per run (default: %(default)s)")
    _add_criterion_flags(ps, epsilon=0.4, iters=100)
    ps.add_argument("--pmax", type=int, default=10,
                    help="largest candidate order, table2/fig2 (default: %(default)s)")
    ps.add_argument("--alphas", default=None,
                    help="comma separated alpha grid for fig2 (default: 2.0 down to 0.5 step 0.05)")
    ps.add_argument("--outdir", default="results", help="output directory (default: %(default)s)")
    ps.add_argument("--jobs", type=int, default=None, help="parallel workers for runs")

    pb = sub.add_parser("bench", help="solve time of MEE vs QMEE over sample sizes")
    pb.add_argument("--nmin", type=int, default=500, help="smallest N (default: %(default)s)")
    pb.add_argument("--nmax", type=int, default=8000,
                    help="largest N; the grid doubles from --nmin (default: %(default)s)")
    pb.add_argument("--iters", type=int, default=10,
                    help="fixed iteration count per solve (default: %(default)s)")
    pb.add_argument("--sigma", type=float, default=0.5, help="(default: %(default)s)")
    pb.add_argument("--epsilon", type=float, default=0.4, help="(default: %(default)s)")
    pb.add_argument("--repeats", type=int, default=3, help="timed solves per N (default: %(default)s)")
    pb.add_argument("--criteria", default="mee,qmee", help="(default: %(default)s)")
    pb.add_argument("--seed", type=int, default=DEFAULT_SEED, help="(default: %(default)s)")
    pb.add_argument("--outdir", default="results", help="output directory (default: %(default)s)")
    return parser


def _criterion_config(args):
    return CriterionConfig(sigma=args.sigma, epsilon=args.epsilon, max_iters=args.iters,
                           tol=args.tol, ridge=args.ridge, init=args.init)


def _gca_config(args):
    return GcaConfig(
        criterion=args.criterion,
        criterion_config=_criterion_config(args),
        p_max=args.pmax,
        order_rule="bic" if args.order is None else "fixed",
        order=args.order,
        bic_variant=args.bic_variant,
        common_order=args.common_order,
    )


def _cmd_analyze(args):
    table = parse_csv(args.input)
    channels = table.series()
    if args.center:
        channels = [c.centered() for c in channels]
    config = _gca_config(args)
    analysis = analyze_channels(channels, config, n_jobs=args.jobs)
    fmt = args.format
    if fmt is None:
        fmt = "csv" if args.output and args.output.lower().endswith(".csv") else "json"
    extra = {"center": args.center, "input": str(args.input), "sample_rate": table.sample_rate}
    if args.output is None:
        import json
        import tempfile

        from .io import report_payload

        if fmt == "json":
            print(json.dumps(report_payload(analysis, extra), indent=2))
        else:
            with tempfile.TemporaryDirectory() as tmp:
                path = Path(tmp) / "report.csv"
                emit_report(analysis, "csv", path, extra)
                sys.stdout.write(path.read_text())
    else:
        emit_report(analysis, fmt, args.output, extra)
        logger.info("wrote %s", args.output)
    for (i, j), msg in analysis.errors.items():
        print(f"warning: pair {analysis.names[i]}/{analysis.names[j]} failed: {msg}",
              file=sys.stderr)
    return 0


def _parse_list(text, cast):
    return tuple(cast(v.strip()) for v in text.split(",") if v.strip())


def _cmd_simulate(args):
    if args.case == "all":
        cases = ("case1", "case2", "case3")
    else:
        cases = (args.case if args.case.startswith("case") else f"case{args.case}",)
    runs = args.runs
    if runs is None:
        runs = 50 if args.experiment == "fig2" else 100
    criteria = _parse_list(args.criteria, str)
    kwargs = dict(
        experiment=args.experiment, runs=runs, base_seed=args.seed, cases=cases,
        criteria=criteria, n=args.n, criterion_config=_criterion_config(args), p_max=args.pmax,
        n_jobs=args.jobs,
    )
    if args.experiment == "fig2":
        kwargs["alpha_grid"] = (_parse_list(args.alphas, float) if args.alphas
                                else DEFAULT_ALPHA_GRID)
    spec = ExperimentSpec(**kwargs)
    result = run_experiment(spec)
    paths = result.write(args.outdir)
    for (group, crit), stats in result.summary.items():
        parts = [f"{m}={stats[m]['mean']:.4f}+-{stats[m]['std']:.4f}" for m in result.metrics]
        fail = f" failures={stats['failures']}" if stats["failures"] else ""
        print(f"{group:12s} {crit:5s} " + " ".join(parts) + fail)
    if "rvr" in result.extra:
        for crit, curve in result.extra["rvr"].items():
            print(f"RVR {crit:5s} max={rvr_max(curve):.4f}")
    logger.info("wrote %d files to %s", len(paths), args.outdir)
    return 0


def _cmd_bench(args):
    grid = []
    n = args.nmin
    while n <= args.nmax:
        grid.append(n)
        n *= 2
    if not grid:
        raise ValueError("--nmin must not exceed --nmax")
    spec = ExperimentSpec(
        experiment="fig1", runs=1, base_seed=args.seed, criteria=_parse_list(args.criteria, str),
        criterion_config=CriterionConfig(sigma=args.sigma, epsilon=args.epsilon,
                                         max_iters=args.iters, tol=0.0),
        n_grid=tuple(grid), timing_repeats=args.repeats,
    )
    result = run_experiment(spec)
    result.write(args.outdir)
    for row in result.extra["timing"]:
        print(f"{row['criterion']:5s} N={row['n']:6d} {row['seconds']:.6f}s")
    for crit in spec.criteria:
        rows = [r for r in result.extra["timing"] if r["criterion"] == crit]
        if len(rows) >= 2:
            slope = loglog_slope([r["n"] for r in rows], [r["seconds"] for r in rows])
            print(f"{crit:5s} log-log slope {slope:.2f}")
    return 0


def main(argv=None):
    """Run the CLI; returns the process exit code (2 usage, 1 data error)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"analyze": _cmd_analyze, "simulate": _cmd_simulate, "bench": _cmd_bench}
    try:
        return handler[args.command](args)
    except (GrangerError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
