#!/usr/bin/env python3
"""Rerun the b = 1 and b = 2 searches and print them next to the published rows."""

import argparse
import time

from recsquares.search import SearchOptions, run_search

PUBLISHED = {1: (167, 144, 2), 2: (2482503, 1881618, 0)}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--b", type=int, nargs="+", default=[1, 2], choices=[1, 2])
    ap.add_argument("--mode", default="published")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    print(f"{'b':>2} {'D_b':>10} {'c1':>10} {'c2':>3}   published (D_b, c1, c2)   time")
    for b in args.b:
        t0 = time.perf_counter()
        r = run_search(b, SearchOptions(mode=args.mode), threads=args.threads)
        dt = time.perf_counter() - t0
        print(f"{b:>2} {r.D_b:>10} {r.candidate_count:>10} {r.flagged_count:>3}   {str(PUBLISHED[b]):<24}  {dt:.1f}s")
        for tp, f in zip(r.flagged_tuples, r.flagged):
            wit = ", ".join(f"k={w['k']} y={w['root']}^2" for w in f["witnesses"])
            print(f"     flagged {tp}  N_alpha={f['n_alpha']}  {wit}")


if __name__ == "__main__":
    main()
