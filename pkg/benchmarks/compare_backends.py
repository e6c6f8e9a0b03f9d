"""Time range queries with the compiled kernels against the numpy fallback.

    python3 benchmarks/compare_backends.py --n 20000 --dim 10 --queries 300

Both backends run on the same trees; distance counts must match exactly.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from supermetric import kernels
from supermetric.data import calibrate_threshold_empirical, generate_uniform
from supermetric.index import IndexConfig, build, range_query_batch


def time_backend(name, index, Q, t, exclusion):
    with kernels.use_backend(name):
        start = time.perf_counter()
        ids, counts, _ = range_query_batch(index, Q, t, exclusion)
        return time.perf_counter() - start, counts


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--dim", type=int, default=10)
    ap.add_argument("--queries", type=int, default=300)
    ap.add_argument("--fraction", type=float, default=1e-3)
    ap.add_argument("--structures", default="hpt_fft_log,sat_distal_pure,monpt_far,lrt_far,vpt")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if "compiled" not in kernels.available_backends():
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    pool = generate_uniform(args.n + args.queries, args.dim, args.seed)
    data, Q = pool.vectors[: args.n], pool.vectors[args.n:]
    t = calibrate_threshold_empirical(pool, "euclidean", args.fraction, 100_000, args.seed)

    print(f"n={args.n} dim={args.dim} queries={args.queries} t={t:.4f}")
    print(f"{'structure':<18}{'exclusion':<12}{'dist/query':>12}{'python s':>11}{'compiled s':>12}{'speedup':>9}")
    for s in args.structures.split(","):
        index = build(data, "euclidean", IndexConfig.named(s, seed=args.seed))
        for ex in ("hilbert", "hyperbolic"):
            tp, cp = time_backend("python", index, Q, t, ex)
            tc, cc = time_backend("compiled", index, Q, t, ex)
            if not np.array_equal(cp, cc):
                raise SystemExit(f"backends disagree on {s}/{ex}")
            print(f"{s:<18}{ex:<12}{cc.mean():>12.1f}{tp:>11.3f}{tc:>12.4f}{tp / tc:>8.0f}x")


if __name__ == "__main__":
    main()
