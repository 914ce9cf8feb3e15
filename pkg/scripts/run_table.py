#!/usr/bin/env python3
"""Reproduce the class-restricted sum table for the splitting field of
x^3 + x + 1 at x = 20000 / 40000 / 80000 and print deviations from the
previously reported values.

Usage: python3 scripts/run_table.py [--threads N] [--sieve-cache PATH]
"""

import argparse
import sys
import time

from artinsums import cli
from artinsums.sieve import FactorSieve


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--sieve-cache")
    args = ap.parse_args()

    t0 = time.time()
    if args.sieve_cache:
        sieve = FactorSieve.load(args.sieve_cache)
    else:
        sieve = FactorSieve(cli.TABLE_CHECKPOINTS[-1])
    report = cli.reproduce_table(sieve, threads=args.threads)

    head = "  ".join(f"x<={x:>6}" for x in report.checkpoints)
    print(f"{'class':<10} {head}")
    for row in report.rows.values():
        cells = "  ".join(f"{v:>8.3f}" for v in row["values"])
        refs = "  ".join(f"{r:>8.3f}" for r in row["reference"])
        print(f"{row['name']:<10} {cells}   (reported: {refs})")
    worst = max(max(row["deviation"]) for row in report.rows.values())
    print(f"\nworst deviation from reported values: {worst:.4f}")
    print(f"elapsed: {time.time() - t0:.1f}s")
    return 0 if worst <= cli.TABLE_TOLERANCE else 1


if __name__ == "__main__":
    sys.exit(main())
