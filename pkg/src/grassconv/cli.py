"""``grassconv`` command line.

Exit codes: 0 all checks passed, 1 verification failures, 2 usage or parse
error, 3 I/O error.
"""
import argparse
import logging
import sys
import time

from . import __version__, report
from .campaign import (
    CampaignConfig,
    ConfigError,
    run_convexity_boundary,
    run_graph_check,
    run_verify_hessians,
    total_failures,
    worker_count,
)
from .estimates import ESTIMATES
from .graphs import tabulated_graph
from .jetfile import JetFileError, read_jets

log = logging.getLogger("grassconv")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _estimates(text):
    if text == "all":
        return list(ESTIMATES)
    return [s.strip() for s in text.split(",") if s.strip()]


def _common(p, samples_flag="--samples", default_margin=1e-3):
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=2)
    p.add_argument(samples_flag, dest="samples", type=int, default=1000 if samples_flag == "--samples" else 20)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--margin", type=float, default=default_margin)
    p.add_argument("--output", "-o", default=None, help="report path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (capped by GRASSCONV_THREADS)")
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock seconds in the report meta")


def build_parser():
    ap = argparse.ArgumentParser(prog="grassconv", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-hessians", help="PSD checks of the Hessian estimates")
    _common(p)
    p.add_argument("--estimates", type=_estimates, default=list(ESTIMATES),
                   help="comma-separated labels or 'all'")

    p = sub.add_parser("convexity-boundary", help="two-sided test of the convexity domain")
    _common(p, default_margin=1e-2)

    p = sub.add_parser("graph-check", help="pointwise checks on graphs via the Gauss map")
    _common(p, samples_flag="--points")
    p.add_argument("--graph", required=True,
                   help="affine | holomorphic-pair | lawson-osserman | file:<path>")

    p = sub.add_parser("report-diff", help="compare two JSON reports")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--tol", type=float, default=0.0)
    p.add_argument("--include-meta", action="store_true")
    return ap


def _config(args):
    return CampaignConfig(
        n=args.n, m=args.m, samples=args.samples, seed=args.seed, tolerance=args.tol,
        margin=args.margin, estimates=getattr(args, "estimates", list(ESTIMATES)),
        output=args.output, format=args.format,
    )


def _emit(rep, cfg):
    text = report.to_json(rep) if cfg.format == "json" else report.to_csv(rep)
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _print_summary(rep):
    for r in rep["results"]:
        state = "PASS" if r["failed"] == 0 else "FAIL"
        extra = f" min_eig={r['min_eig']:.3e}" if isinstance(r.get("min_eig"), float) else ""
        print(f"{state} {r['estimate']}: passed={r['passed']} failed={r['failed']}{extra}",
              file=sys.stderr)


def _report_diff(args):
    try:
        with open(args.left, encoding="utf-8") as fa, open(args.right, encoding="utf-8") as fb:
            a, b = report.from_json(fa.read()), report.from_json(fb.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: cannot parse report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not args.include_meta:
        a.pop("meta", None)
        b.pop("meta", None)
    diffs = report.diff(a, b, args.tol)
    for d in diffs:
        print(d)
    return EXIT_FAIL if diffs else EXIT_OK


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "report-diff":
        return _report_diff(args)

    cfg = _config(args)
    workers = worker_count(args.workers)
    t0 = time.perf_counter()
    try:
        cfg.validate()
        if args.command == "verify-hessians":
            rep = run_verify_hessians(cfg, workers)
        elif args.command == "convexity-boundary":
            rep = run_convexity_boundary(cfg, workers)
        elif args.graph.startswith("file:"):
            graph = tabulated_graph(read_jets(args.graph[len("file:"):]))
            rep = run_graph_check("file", cfg, graph, graph.points)
        else:
            rep = run_graph_check(args.graph, cfg)
    except (ConfigError, JetFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    rep["meta"]["version"] = __version__
    if args.timing:
        rep["meta"]["wall_clock_s"] = time.perf_counter() - t0
    log.info("finished in %.2fs", time.perf_counter() - t0)
    try:
        _emit(rep, cfg)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    _print_summary(rep)
    return EXIT_FAIL if total_failures(rep) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
