"""Exact verification machinery for the divisor-sum duality identities
that exchange information between smallest and k-th largest prime
factors, and for the Mobius-inversion form that the class-restricted
series results rest on.

Everything here is exact rational arithmetic: these are identities, not
estimates, so there is no tolerance anywhere.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable

from .galois import GaloisContext
from .sieve import FactorSieve


@dataclass(frozen=True)
class PrimeWeight:
    """Arithmetic function supported on the primes with f(1) = 0."""

    name: str
    fn: Callable[[int], Fraction]

    def __call__(self, m: int) -> Fraction:
        if m == 1:
            return Fraction(0)
        return self.fn(m)


def indicator_weight(predicate: Callable[[int], bool], name: str) -> PrimeWeight:
    return PrimeWeight(name, lambda p: Fraction(1 if predicate(p) else 0))


def residue_weight(ell: int, k: int) -> PrimeWeight:
    """Indicator of primes congruent to ell mod k."""
    return indicator_weight(lambda p: p % k == ell, f"p = {ell} mod {k}")

def class_weight(ctx: GaloisContext, label: str) -> PrimeWeight:
    """Indicator of primes whose Frobenius class is `label` (ramified
    primes get 0)."""
    def fn(p: int) -> Fraction:
        out = ctx.classify(p)
        return Fraction(1 if (not out.is_ramified and out.label == label) else 0)
    return PrimeWeight(f"class {label} in {ctx.spec_string()}", fn)


def random_weight(seed: int) -> PrimeWeight:
    """Seeded pseudorandom rational weight, bounded in [-5, 5] with
    denominators <= 6.  Deterministic in (seed, p)."""
    def fn(p: int) -> Fraction:
        rng = random.Random((seed << 32) ^ p)
        return Fraction(rng.randint(-5, 5), rng.randint(1, 6))
    return PrimeWeight(f"random[{seed}]", fn)


@dataclass(frozen=True)
class IdentityReport:
    n: int
    identity: int  # 1..4, or 0 for the inversion form
    k: int
    lhs: Fraction
    rhs: Fraction

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs


def _binom(m: int, j: int) -> int:
    # the m = -1 case only ever multiplies f(1) = 0; fixed for definiteness
    if m < 0:
        return 1 if (m == -1 and j == 0) else 0
    return comb(m, j) if j <= m else 0


def _distinct_primes(sieve: FactorSieve, n: int) -> list[int]:
    return [p for p, _ in sieve.factorize(n)]


def _kth(primes_sorted: list[int], k: int, largest: bool) -> int:
    """k-th largest (or smallest) element of an increasing prime list,
    1 when there are fewer than k."""
    if k > len(primes_sorted):
        return 1
    return primes_sorted[-k] if largest else primes_sorted[k - 1]


def divisor_sum(
    sieve: FactorSieve, n: int, k: int, identity: int, weight: PrimeWeight
) -> Fraction:
    """Left-hand side of one of the four duality identities, by full
    divisor enumeration.

    1: sum_{d|n} mu(d) f(P_k(d))
    2: sum_{d|n} mu(d) f(p_k(d))
    3: sum_{d|n} mu(d) C(omega(d)-1, k-1) f(P_1(d))
    4: sum_{d|n} mu(d) C(omega(d)-1, k-1) f(p_1(d))

    Only squarefree divisors contribute (mu kills the rest), so d ranges
    over subsets of the distinct primes of n; d = 1 contributes 0 because
    f(1) = 0.
    """
    if identity not in (1, 2, 3, 4):
        raise ValueError(f"identity must be 1..4, got {identity}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 2 <= n <= sieve.limit:
        raise ValueError(f"n = {n} outside [2, {sieve.limit}]")
    primes = _distinct_primes(sieve, n)
    total = Fraction(0)
    for r in range(1, len(primes) + 1):
        mu_d = -1 if r % 2 else 1
        for subset in combinations(primes, r):
            if identity == 1:
                term = weight(_kth(list(subset), k, largest=True))
            elif identity == 2:
                term = weight(subset[k - 1] if k <= r else 1)
            elif identity == 3:
                term = _binom(r - 1, k - 1) * weight(subset[-1])
            else:
                term = _binom(r - 1, k - 1) * weight(subset[0])
            total += mu_d * term
    return total


def identity_rhs(
    sieve: FactorSieve, n: int, k: int, identity: int, weight: PrimeWeight
) -> Fraction:
    primes = _distinct_primes(sieve, n)
    sign = (-1) ** k
    if identity == 1:
        return sign * _binom(len(primes) - 1, k - 1) * weight(primes[0])
    if identity == 2:
        return sign * _binom(len(primes) - 1, k - 1) * weight(primes[-1])
    if identity == 3:
        return sign * weight(_kth(primes, k, largest=False))
    return sign * weight(_kth(primes, k, largest=True))


def check_identity(
    sieve: FactorSieve, n: int, k: int, identity: int, weight: PrimeWeight
) -> IdentityReport:
    lhs = divisor_sum(sieve, n, k, identity, weight)
    rhs = identity_rhs(sieve, n, k, identity, weight)
    return IdentityReport(n, identity, k, lhs, rhs)


def check_all_identities(
    sieve: FactorSieve, n: int, kmax: int, weight: PrimeWeight
) -> list[IdentityReport]:
    """All four identities for k = 1..kmax in one subset-enumeration pass."""
    primes = _distinct_primes(sieve, n)
    zero = Fraction(0)
    lhs = {(i, k): zero for i in (1, 2, 3, 4) for k in range(1, kmax + 1)}
    fcache = {p: weight(p) for p in primes}
    fcache[1] = zero
    for r in range(1, len(primes) + 1):
        mu_d = -1 if r % 2 else 1
        for subset in combinations(primes, r):
            f_small = fcache[subset[0]]
            f_large = fcache[subset[-1]]
            for k in range(1, kmax + 1):
                b = _binom(r - 1, k - 1)
                lhs[1, k] += mu_d * fcache[subset[-k] if k <= r else 1]
                lhs[2, k] += mu_d * fcache[subset[k - 1] if k <= r else 1]
                if b:
                    lhs[3, k] += mu_d * b * f_large
                    lhs[4, k] += mu_d * b * f_small
    return [
        IdentityReport(n, i, k, lhs[i, k], identity_rhs(sieve, n, k, i, weight))
        for i in (1, 2, 3, 4)
        for k in range(1, kmax + 1)
    ]


def check_inversion(sieve: FactorSieve, n: int, weight: PrimeWeight) -> IdentityReport:
    """Mobius-inverted second-order duality:
    mu(n)(omega(n)-1) f(p1(n)) = sum_{d|n} mu(n/d) f(P2(d)),
    with the strict (distinct-prime) second-largest factor."""
    if not 2 <= n <= sieve.limit:
        raise ValueError(f"n = {n} outside [2, {sieve.limit}]")
    mu_n, omega_n, _ = sieve.arith_fns(n)
    p1 = sieve.prime_extremes(n)[0]
    lhs = mu_n * (omega_n - 1) * weight(p1)
    rhs = Fraction(0)
    for d in _divisors(sieve, n):
        mu_cof = sieve.arith_fns(n // d)[0]
        if mu_cof:
            rhs += mu_cof * weight(sieve.prime_extremes(d)[2] if d > 1 else 1)
    return IdentityReport(n, 0, 2, Fraction(lhs), rhs)


def _divisors(sieve: FactorSieve, n: int) -> list[int]:
    divs = [1]
    for p, e in sieve.factorize(n):
        divs = [d * p**j for d in divs for j in range(e + 1)]
    return sorted(divs)


def hyperbola_check(sieve: FactorSieve, x: int, weight: PrimeWeight) -> tuple[Fraction, Fraction]:
    """Both sides of the divisor-sum rearrangement
    sum_{n<=x} sum_{d|n} mu(n/d) f(P2(d))
      = sum_{m<=x} mu(m) sum_{d<=x/m} f(P2(d)).
    Returns (lhs, rhs); they must be equal exactly."""
    f_of_P2 = [Fraction(0)] * (x + 1)
    for d in range(1, x + 1):
        f_of_P2[d] = weight(sieve.prime_extremes(d)[2] if d > 1 else 1)
    lhs = Fraction(0)
    for n in range(1, x + 1):
        for d in _divisors(sieve, n):
            mu_cof = sieve.arith_fns(n // d)[0]
            if mu_cof:
                lhs += mu_cof * f_of_P2[d]
    prefix = [Fraction(0)] * (x + 1)
    for d in range(1, x + 1):
        prefix[d] = prefix[d - 1] + f_of_P2[d]
    rhs = Fraction(0)
    for m in range(1, x + 1):
        mu_m = sieve.arith_fns(m)[0]
        if mu_m:
            rhs += mu_m * prefix[x // m]
    return lhs, rhs
