#!/usr/bin/env python3
"""Run a deterministic 1/STRIDE subsample of the b = 3 work units.

With --oracle the same units are recounted by the naive reference in
tests/oracles.py (slow: several minutes at the default stride).
"""

import argparse
import sys
import time
from pathlib import Path

from recsquares.search import SearchOptions, run_search


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shards", type=int, default=100_000)
    ap.add_argument("--stride", type=int, default=1000)
    ap.add_argument("--offset", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--oracle", action="store_true")
    args = ap.parse_args()

    t0 = time.perf_counter()
    r = run_search(3, SearchOptions(), threads=args.threads, shards=args.shards, sample=(args.stride, args.offset))
    print(f"{len(r.ledger)} of {r.shards} units: c1={r.candidate_count} c2={r.flagged_count} ({time.perf_counter() - t0:.1f}s)")
    for tp in r.flagged_tuples:
        print("flagged", tp)
    if args.oracle:
        sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
        from oracles import naive_search

        t0 = time.perf_counter()
        segs = [tuple(s) for res in r.ledger for s in res["segments"]]
        count, flagged = naive_search(3, segs, r.d_limits, "published")
        same = count == r.candidate_count and sorted(flagged) == r.flagged_tuples
        print(f"naive oracle: c1={count} c2={len(flagged)} ({time.perf_counter() - t0:.1f}s) {'agrees' if same else 'DISAGREES'}")
        sys.exit(0 if same else 2)


if __name__ == "__main__":
    main()
