#!/usr/bin/env python3
"""Random sweep of tuples, reporting distinct-square counts against the conjectured ceilings."""

import argparse
import sys

from recsquares.evidence import emit_report, random_tuples, sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=31337)
    ap.add_argument("--max-norm", type=int, default=10**4)
    ap.add_argument("--k-max", type=int, default=30)
    ap.add_argument("--format", choices=("table", "jsonl"), default="table")
    args = ap.parse_args()

    records = sweep(random_tuples(args.count, seed=args.seed, max_norm=args.max_norm), k_max=args.k_max)
    sys.stdout.write(emit_report(records, args.format))
    bad = [r for r in records if r.violations]
    for r in bad:
        print(f"FALSIFICATION {r.tuple}: {'; '.join(r.violations)}", file=sys.stderr)
    sys.exit(2 if bad else 0)


if __name__ == "__main__":
    main()
