"""Smallest-prime-factor sieve and the multiplicative-structure functions
derived from it: mu, omega, Omega, smallest/largest/second-largest prime
factors, and smooth-number machinery.

The sieve stores one uint32 per integer (4 bytes/entry), so a limit of
10^7 costs ~40 MB.  All query methods are read-only; the table is never
mutated after construction and may be shared freely across threads.
"""

from __future__ import annotations

import random
import struct
from math import isqrt

import numpy as np

DEFAULT_LIMIT = 10_000_000

_CACHE_MAGIC = b"AFS1"
_CACHE_VERSION = 1


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond any sieve limit we use."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # these bases are a proven witness set for n < 3.3 * 10^24
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class FactorSieve:
    """Immutable table of smallest prime factors for 2..limit.

    spf[n] is the smallest prime dividing n; spf[p] = p exactly when p is
    prime.  Entries 0 and 1 are 0 and unused.
    """

    def __init__(self, limit: int, _spf: np.ndarray | None = None):
        if limit < 2:
            raise ValueError(f"sieve limit must be >= 2, got {limit}")
        self.limit = int(limit)
        self.spf = _build_spf(self.limit) if _spf is None else _spf
        self._primes: np.ndarray | None = None
        self._derived: dict[str, np.ndarray] = {}

    # -- construction / persistence ------------------------------------

    @classmethod
    def load(cls, path) -> "FactorSieve":
        """Load a sieve cache written by save(); validates the header and
        spot-checks up to 16 entries for primality."""
        with open(path, "rb") as fh:
            head = fh.read(13)
            if len(head) < 13 or head[:4] != _CACHE_MAGIC:
                raise IOError(f"{path}: not a sieve cache (bad magic)")
            version = head[4]
            if version != _CACHE_VERSION:
                raise IOError(f"{path}: unsupported cache version {version}")
            (limit,) = struct.unpack("<Q", head[5:13])
            body = np.fromfile(fh, dtype="<u4")
        if limit < 2 or len(body) != limit - 1:
            raise IOError(
                f"{path}: truncated cache ({len(body)} entries for limit {limit})"
            )
        spf = np.zeros(limit + 1, dtype=np.uint32)
        spf[2:] = body
        rng = random.Random()
        count = int(limit - 1)
        for idx in rng.sample(range(2, limit + 1), min(16, count)):
            p = int(spf[idx])
            if not is_prime(p) or idx % p != 0:
                raise IOError(f"{path}: corrupt cache, spf[{idx}] = {p}")
        return cls(limit, _spf=spf)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(_CACHE_MAGIC)
            fh.write(bytes([_CACHE_VERSION]))
            fh.write(struct.pack("<Q", self.limit))
            self.spf[2:].astype("<u4").tofile(fh)

    # -- scalar queries ------------------------------------------------

    def _check_range(self, n: int, lo: int = 1) -> None:
        if not lo <= n <= self.limit:
            raise ValueError(f"n = {n} outside [{lo}, {self.limit}]")

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """(prime, exponent) pairs, primes increasing; empty for n = 1."""
        self._check_range(n)
        out: list[tuple[int, int]] = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def arith_fns(self, n: int) -> tuple[int, int, int]:
        """(mu, omega, Omega); by convention (1, 0, 0) at n = 1."""
        self._check_range(n)
        mu, omega, big = 1, 0, 0
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            omega += 1
            big += e
            mu = 0 if e > 1 else -mu
        return mu, omega, big

    def prime_extremes(self, n: int) -> tuple[int, int, int, int]:
        """(p1, P1, P2_strict, P2_mult) with the value-1 conventions for
        small omega/Omega.  P2_strict is the largest prime factor strictly
        below P1; P2_mult is the largest prime factor of n / P1."""
        self._check_range(n)
        fac = self.factorize(n)
        if not fac:
            return 1, 1, 1, 1
        p1 = fac[0][0]
        P1, e1 = fac[-1]
        P2_strict = fac[-2][0] if len(fac) >= 2 else 1
        if e1 >= 2:
            P2_mult = P1
        else:
            P2_mult = P2_strict
        return p1, P1, P2_strict, P2_mult

    def is_P1_repeated(self, n: int) -> bool:
        """True iff the largest prime factor divides n at least twice."""
        self._check_range(n, lo=2)
        _, P1, _, _ = self.prime_extremes(n)
        return n % (P1 * P1) == 0

    def primes_up_to(self, x: int):
        """Increasing iterator over primes <= x."""
        if x > self.limit:
            raise ValueError(f"x = {x} exceeds sieve limit {self.limit}")
        return iter(self.prime_array(x).tolist())

    # -- bulk tables (built lazily, cached) ----------------------------

    def prime_array(self, x: int | None = None) -> np.ndarray:
        if self._primes is None:
            idx = np.arange(self.limit + 1, dtype=np.uint32)
            self._primes = np.nonzero(self.spf == idx)[0][1:]  # drop n=0 match
        if x is None or x >= self.limit:
            return self._primes
        return self._primes[: np.searchsorted(self._primes, x, side="right")]

    def mu_table(self) -> np.ndarray:
        """int8 array, mu_table()[n] = mu(n) for 1 <= n <= limit."""
        self._build_mult_tables()
        return self._derived["mu"]

    def omega_table(self) -> np.ndarray:
        self._build_mult_tables()
        return self._derived["omega"]

    def P1_table(self) -> np.ndarray:
        """Largest prime factor of n, with P1[1] = 1."""
        if "P1" not in self._derived:
            P1 = np.zeros(self.limit + 1, dtype=np.uint32)
            P1[1] = 1
            for p in self.prime_array().tolist():
                P1[p::p] = p
            self._derived["P1"] = P1
        return self._derived["P1"]

    def P2_strict_table(self) -> np.ndarray:
        self._build_P2_tables()
        return self._derived["P2s"]

    def repeated_P1_table(self) -> np.ndarray:
        """Boolean array, True where P1(n)^2 | n."""
        self._build_P2_tables()
        return self._derived["rep"]

    def _build_mult_tables(self) -> None:
        if "mu" in self._derived:
            return
        N = self.limit
        mu = np.ones(N + 1, dtype=np.int8)
        mu[0] = 0
        omega = np.zeros(N + 1, dtype=np.int8)
        for p in self.prime_array().tolist():
            mu[p::p] *= -1
            omega[p::p] += 1
            pp = p * p
            if pp <= N:
                mu[pp::pp] = 0
        self._derived["mu"] = mu
        self._derived["omega"] = omega

    def _build_P2_tables(self) -> None:
        if "P2s" in self._derived:
            return
        N = self.limit
        P1 = self.P1_table().astype(np.int64)
        n = np.arange(N + 1, dtype=np.int64)
        q = P1.copy()
        q[:2] = 1
        rep = np.zeros(N + 1, dtype=bool)
        rep[2:] = (n[2:] // q[2:]) % q[2:] == 0
        # strip every copy of the largest prime factor
        rem = n.copy()
        rem[:2] = 1
        mask = rem % q == 0
        mask[:2] = False
        while mask.any():
            rem[mask] //= q[mask]
            mask &= rem % q == 0
        P2s = np.where(rem > 1, self.P1_table()[rem], 1).astype(np.uint32)
        P2s[:2] = 1
        self._derived["P2s"] = P2s
        self._derived["rep"] = rep


def _build_spf(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    left = np.nonzero(spf[2:] == 0)[0] + 2
    spf[left] = left
    return spf


def build_sieve(limit: int) -> FactorSieve:
    return FactorSieve(limit)
