#!/usr/bin/env python3
"""Convergence curve of the class-restricted sums: scan one context up to
x_max with logarithmically spaced checkpoints and emit a CSV series
suitable for plotting.

Examples:
    python3 scripts/convergence_scan.py --cyclotomic 4 --xmax 1000000
    python3 scripts/convergence_scan.py --poly 1,1,0,1 --xmax 1000000 \
        --out cubic.csv --threads 4
"""

import argparse
import csv
import sys

from artinsums import series
from artinsums.cli import parse_poly
from artinsums.galois import new_cyclotomic, new_splitting_field
from artinsums.sieve import FactorSieve


def log_checkpoints(x_max: int, per_decade: int = 4) -> list[int]:
    cps = []
    x = 100
    while x < x_max:
        for i in range(per_decade):
            c = int(round(x * 10 ** (i / per_decade)))
            if 100 <= c < x_max:
                cps.append(c)
        x *= 10
    return sorted(set(cps))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cyclotomic", type=int)
    ap.add_argument("--poly")
    ap.add_argument("--xmax", type=int, default=1_000_000)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--kind", default="mu_omega_over_n", choices=series.ALL_KINDS)
    ap.add_argument("--out")
    args = ap.parse_args()

    if (args.cyclotomic is None) == (args.poly is None):
        ap.error("exactly one of --cyclotomic or --poly is required")
    ctx = (
        new_cyclotomic(args.cyclotomic)
        if args.cyclotomic
        else new_splitting_field(parse_poly(args.poly))
    )

    sieve = FactorSieve(args.xmax)
    result = series.scan(
        ctx,
        args.xmax,
        checkpoints=log_checkpoints(args.xmax),
        sieve=sieve,
        threads=args.threads,
    )

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["x"] + ctx.labels() + ["total"])
    for x in result.checkpoints:
        snap = result.snapshots[x]
        row = [x]
        row += [repr(snap.classes[lab][args.kind]) for lab in ctx.labels()]
        row.append(repr(snap.total[args.kind]))
        writer.writerow(row)
    if args.out:
        fh.close()
        print(f"wrote {len(result.checkpoints)} checkpoints to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
