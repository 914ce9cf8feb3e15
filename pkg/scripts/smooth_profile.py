#!/usr/bin/env python3
"""Compare Psi(x, x^(1/alpha)) / x against the Dickman rho approximation
and the e^(-alpha/2) decay envelope over a grid of alpha.

Usage: python3 scripts/smooth_profile.py [--x 1000000] [--alpha-max 6]
"""

import argparse
import math
import sys

from artinsums import series
from artinsums.sieve import FactorSieve


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x", type=int, default=1_000_000)
    ap.add_argument("--alpha-max", type=float, default=6.0)
    ap.add_argument("--step", type=float, default=0.25)
    args = ap.parse_args()

    sieve = FactorSieve(args.x)
    print(f"{'alpha':>6} {'y':>8} {'Psi/x':>12} {'rho(alpha)':>12} {'K':>8}")
    a = 1.0
    while a <= args.alpha_max + 1e-9:
        y = max(2, int(round(args.x ** (1.0 / a))))
        density = series.psi_smooth(args.x, y, sieve) / args.x
        rho = series.dickman_rho(a)
        envelope_k = density * math.exp(a / 2)
        print(f"{a:>6.2f} {y:>8} {density:>12.6f} {rho:>12.6f} {envelope_k:>8.3f}")
        a += args.step
    return 0


if __name__ == "__main__":
    sys.exit(main())
