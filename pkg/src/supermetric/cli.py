"""Command-line harness: ``supermetric <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path

from .data import ThresholdSpec, calibrate_radius, calibrate_threshold_empirical, idim, load_dataset
from .errors import ParseError
from .experiments import (
    DIM_SWEEP_STRUCTURES,
    PIVOT_MODES,
    SCALING_STRUCTURES,
    BenchRow,
    BenchSettings,
    VerificationError,
    check_exclusions,
    overhead_report,
    run_bench,
    run_dim_sweep,
    run_scaling,
    run_scatter,
)
from .index.config import EXCLUSIONS, STRUCTURES
from .metrics import get_metric
from .planar import STRATEGIES
from .svg import scatter_svg

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(float(v)) for v in text.split(",") if v.strip()]


def _dims(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return _ints(text)


def _write_rows(rows, header, out: str | None) -> None:
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    finally:
        if out:
            fh.close()


def _dataclass_rows(rows):
    if not rows:
        return [], []
    header = [f.name for f in dataclasses.fields(rows[0])]
    return [dataclasses.astuple(r) for r in rows], header


def cmd_bench(args) -> int:
    metric = get_metric(args.metric)
    structures = args.structure or ["hpt_fft_log"]
    exclusions = args.exclusion or (["hilbert", "hyperbolic"] if metric.four_point else ["hyperbolic"])
    # reject illegal combinations before loading anything
    try:
        check_exclusions(metric, exclusions)
    except ValueError as e:
        raise UsageError(str(e)) from None
    unknown = [s for s in structures if s not in STRUCTURES]
    if unknown:
        raise UsageError(f"unknown structure(s): {', '.join(unknown)}")
    thresholds = [ThresholdSpec.parse(t) for t in (args.threshold or ["frac:0.001"])]
    dataset = load_dataset(args.data, args.seed)
    settings = BenchSettings(sem_target=args.sem_target, min_repeats=args.min_repeats,
                             max_repeats=args.max_repeats, verify=args.verify, threads=args.threads,
                             seed=args.seed)
    rows = run_bench(dataset, metric, structures, exclusions, thresholds, args.query_fraction, settings)
    _write_rows([r.values() for r in rows], BenchRow.header(), args.out)
    return EXIT_OK


def cmd_dim_sweep(args) -> int:
    rows = run_dim_sweep(_dims(args.dims), n=args.n, queries=args.queries,
                         structures=args.structures.split(","), seed=args.seed,
                         sem_target=args.sem_target, max_repeats=args.max_repeats)
    _write_rows(*_dataclass_rows(rows), args.out)
    return EXIT_OK


def cmd_scatter(args) -> int:
    metric = get_metric(args.metric)
    exclusion = args.exclusion or ("hilbert" if metric.four_point else "hyperbolic")
    try:
        check_exclusions(metric, [exclusion])
    except ValueError as e:
        raise UsageError(str(e)) from None
    dataset = load_dataset(args.data, args.seed)
    res = run_scatter(dataset, args.t, args.pivot_mode, args.sample, args.strategy, metric, args.seed)
    flag = res.exclusive[exclusion]
    if args.csv_out:
        rows = zip(res.ids.tolist(), res.x.tolist(), res.y.tolist(), res.side.tolist(), flag.astype(int).tolist())
        _write_rows(rows, ["point_id", "x", "y", "side", "exclusive_flag"], args.csv_out)
    if args.svg_out:
        title = f"{args.pivot_mode} pivots, t={args.t:g}, {exclusion}: {res.non_exclusive(exclusion)} non-exclusive"
        Path(args.svg_out).write_text(scatter_svg(res.x, res.y, flag, res.delta, args.t, title))
    summary = [["pivot_mode", "delta", "t", "exclusion", "non_exclusive", "exclusion_probability"]]
    for ex in sorted(res.exclusive):
        summary.append([args.pivot_mode, res.delta, args.t, ex, res.non_exclusive(ex), res.exclusion_probability(ex)])
    _write_rows(summary[1:], summary[0], None)
    return EXIT_OK


def cmd_scaling(args) -> int:
    metric = get_metric(args.metric)
    exclusions = args.exclusion or (["hilbert", "hyperbolic"] if metric.four_point else ["hyperbolic"])
    try:
        check_exclusions(metric, exclusions)
    except ValueError as e:
        raise UsageError(str(e)) from None
    sizes = _ints(args.sizes)
    data_spec = args.data or f"synth:{max(sizes) + args.queries},{args.dim}"
    dataset = load_dataset(data_spec, args.seed)
    rows = run_scaling(dataset, sizes, args.structures.split(","), _floats(args.fractions), exclusions,
                       args.queries, metric, args.seed)
    _write_rows(*_dataclass_rows(rows), args.out)
    return EXIT_OK


def cmd_overhead(args) -> int:
    total, per = overhead_report(args.n, args.arity_policy)
    _write_rows([[args.n, args.arity_policy, total, per]], ["n", "arity_policy", "total_bytes", "bytes_per_object"], None)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    fractions = _floats(args.fractions)
    if args.dim is not None:
        rows = [[f, calibrate_radius(args.dim, f)] for f in fractions]
    else:
        if not args.data:
            raise UsageError("calibrate needs --data or --dim")
        dataset = load_dataset(args.data, args.seed)
        rows = [[f, calibrate_threshold_empirical(dataset, args.metric, f, args.sample_pairs, args.seed)]
                for f in fractions]
    _write_rows(rows, ["fraction", "threshold"], args.out)
    return EXIT_OK


def cmd_idim(args) -> int:
    dataset = load_dataset(args.data, args.seed)
    value = idim(dataset, args.metric, args.sample_pairs, args.seed)
    _write_rows([[dataset.name, get_metric(args.metric).name, value]], ["data", "metric", "idim"], None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="supermetric", description="Exact metric/supermetric range search benchmarks.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS, help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bench", parents=[common], help="distance counts per query with SEM-controlled rebuilds")
    b.add_argument("--data", required=True, help="ascii vector file, dataset name, or synth:n,dim")
    b.add_argument("--metric", default="euclidean")
    b.add_argument("--structure", action="append", help=f"repeatable; one of {', '.join(STRUCTURES)}")
    b.add_argument("--exclusion", action="append", choices=EXCLUSIONS)
    b.add_argument("--threshold", action="append", help="absolute value or frac:<fraction> (repeatable)")
    b.add_argument("--query-fraction", type=float, default=0.10)
    b.add_argument("--sem-target", type=float, default=0.01)
    b.add_argument("--min-repeats", type=int, default=3)
    b.add_argument("--max-repeats", type=int, default=20)
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--verify", action="store_true", help="check 1%% of queries against a linear scan")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    d = sub.add_parser("dim-sweep", parents=[common], help="uniform hypercube data over a range of dimensions")
    d.add_argument("--dims", default="2..20", help="a..b or comma list")
    d.add_argument("--n", type=int, default=100_000)
    d.add_argument("--queries", type=int, default=1000)
    d.add_argument("--structures", default=",".join(DIM_SWEEP_STRUCTURES))
    d.add_argument("--sem-target", type=float, default=0.01)
    d.add_argument("--max-repeats", type=int, default=5)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out")
    d.set_defaults(func=cmd_dim_sweep)

    s = sub.add_parser("scatter", parents=[common], help="planar projection of a sample against one pivot pair")
    s.add_argument("--data", default="synth:10000,8")
    s.add_argument("--metric", default="euclidean")
    s.add_argument("--pivot-mode", choices=PIVOT_MODES, default="random")
    s.add_argument("--t", type=float, default=0.145)
    s.add_argument("--sample", type=int, default=500)
    s.add_argument("--strategy", choices=STRATEGIES)
    s.add_argument("--exclusion", choices=EXCLUSIONS, help="predicate behind exclusive_flag and the SVG markers")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--svg-out")
    s.add_argument("--csv-out")
    s.set_defaults(func=cmd_scatter)

    c = sub.add_parser("scaling", parents=[common], help="proportion of data accessed on growing subsets")
    c.add_argument("--data", help="defaults to uniform synthetic data")
    c.add_argument("--dim", type=int, default=10, help="dimension of the synthetic default")
    c.add_argument("--sizes", default="10000,100000,1000000")
    c.add_argument("--structures", default=",".join(SCALING_STRUCTURES))
    c.add_argument("--fractions", default="1e-5,1e-4,1e-3")
    c.add_argument("--exclusion", action="append", choices=EXCLUSIONS)
    c.add_argument("--queries", type=int, default=1000)
    c.add_argument("--metric", default="euclidean")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_scaling)

    o = sub.add_parser("overhead", parents=[common], help="bytes of inter-pivot storage")
    o.add_argument("n", type=float)
    o.add_argument("--arity-policy", default="log", help="log, binary or fixed:<k>")
    o.set_defaults(func=cmd_overhead)

    k = sub.add_parser("calibrate", parents=[common], help="thresholds returning a given fraction of the data")
    k.add_argument("--data")
    k.add_argument("--metric", default="euclidean")
    k.add_argument("--fractions", default="1e-4,1e-3,1e-2")
    k.add_argument("--sample-pairs", type=int, default=1_000_000)
    k.add_argument("--dim", type=int, help="use the unit-cube ball-volume radius instead of sampling")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--out")
    k.set_defaults(func=cmd_calibrate)

    i = sub.add_parser("idim", parents=[common], help="intrinsic dimensionality mu^2 / (2 sigma^2)")
    i.add_argument("--data", required=True)
    i.add_argument("--metric", default="euclidean")
    i.add_argument("--sample-pairs", type=int, default=1_000_000)
    i.add_argument("--seed", type=int, default=0)
    i.set_defaults(func=cmd_idim)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except (OSError, ParseError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
