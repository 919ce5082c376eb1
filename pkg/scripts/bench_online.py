#!/usr/bin/env python
"""Offline scaling and online speed-up of precomputed probe embedding.

Equivalent to ``ssm bench`` with larger defaults:

    python scripts/bench_online.py --sizes 500,1000,2000 --query-size 2000
"""

import argparse
import logging

from ssm.bench import format_report, run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--sizes", default="500,1000,2000")
    ap.add_argument("--query-size", type=int, default=2000)
    ap.add_argument("--reps", type=int, default=2)
    ap.add_argument("--iters", type=int, default=30)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    report = run_bench([int(s) for s in args.sizes.split(",")], repetitions=args.reps,
                       iterations=args.iters, query_sizes=[args.query_size],
                       log=logging.getLogger("bench").info)
    print(format_report(report))


if __name__ == "__main__":
    main()
