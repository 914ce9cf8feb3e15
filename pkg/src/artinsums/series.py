"""Single-pass, checkpointed accumulation of the class-restricted partial
sums: for each n <= x the term is routed to the bucket of the Frobenius
class of its smallest prime factor (or to the per-prime ramified bucket),
alongside an unconditional aggregate, so the decomposition

    sum over class buckets + sum over ramified slices = unconditional sum

can be audited at every checkpoint.

Two arithmetic modes:

* ``exact``       -- big-rational accumulation; capped at x <= 10^4
                     because the running lcm denominator growth makes it
                     infeasible beyond desk scale.  Serves as an oracle.
* ``compensated`` -- Neumaier-compensated float accumulation.  Terms are
                     added in ascending n within fixed segments and the
                     segment partials are merged in ascending order, so a
                     scan is bitwise deterministic for a fixed segment
                     size regardless of the thread count.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import fsum

import numpy as np

from .errors import IntegrityError
from .galois import RAMIFIED_CODE, GaloisContext
from .sieve import FactorSieve

EXACT_X_CAP = 10_000
DEFAULT_SEGMENT = 65_536

PER_N_KINDS = ("mu_omega_over_n", "mu_over_n", "mu_omega_minus1_over_n", "mu_omega_raw")
CHECKPOINT_KINDS = ("floor_weighted", "frac_weighted")
ALL_KINDS = PER_N_KINDS + CHECKPOINT_KINDS

_INT_KINDS = {"mu_omega_raw", "floor_weighted"}


class _Neumaier:
    """Compensated accumulator; value() = running sum + correction."""

    __slots__ = ("s", "c")

    def __init__(self, s: float = 0.0, c: float = 0.0):
        self.s = s
        self.c = c

    def add(self, v: float) -> None:
        t = self.s + v
        if abs(self.s) >= abs(v):
            self.c += (self.s - t) + v
        else:
            self.c += (v - t) + self.s
        self.s = t

    def value(self) -> float:
        return self.s + self.c


def _neumaier_list(vals) -> tuple[float, float]:
    s = 0.0
    c = 0.0
    for v in vals:
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s, c


def _pairwise_sum(vals: list[Fraction]) -> Fraction:
    """Tree-shaped Fraction sum; keeps the giant-denominator additions to
    O(log n) instead of O(n)."""
    if not vals:
        return Fraction(0)
    work = list(vals)
    while len(work) > 1:
        work = [
            work[i] + work[i + 1] if i + 1 < len(work) else work[i]
            for i in range(0, len(work), 2)
        ]
    return work[0]


# ---------------------------------------------------------------------------
# scan


@dataclass
class Snapshot:
    x: int
    classes: dict  # label -> {kind: value}
    ramified: dict  # prime -> {kind: value}
    total: dict  # kind -> value
    n2_classes: dict  # label -> int
    n2_ramified: int
    repeat_count: int


@dataclass
class SeriesScan:
    ctx: GaloisContext
    x_max: int
    mode: str
    checkpoints: tuple[int, ...]
    snapshots: dict[int, Snapshot] = field(default_factory=dict)


def scan(
    ctx: GaloisContext,
    x_max: int,
    checkpoints=None,
    mode: str = "compensated",
    sieve: FactorSieve | None = None,
    threads: int = 1,
    segment_size: int = DEFAULT_SEGMENT,
    state_path=None,
    resume: bool = False,
) -> SeriesScan:
    if sieve is None:
        raise ValueError("a FactorSieve is required")
    if x_max < 2 or x_max > sieve.limit:
        raise ValueError(f"x_max = {x_max} outside [2, {sieve.limit}]")
    if mode not in ("exact", "compensated"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact" and x_max > EXACT_X_CAP:
        raise ValueError(f"exact mode is capped at x = {EXACT_X_CAP}")
    cps = sorted(set(checkpoints)) if checkpoints else []
    if cps and (cps[0] < 2 or cps[-1] > x_max):
        raise ValueError("checkpoints must lie in [2, x_max]")
    if x_max not in cps:
        cps.append(x_max)
    cps = tuple(cps)

    ram_primes = sorted(p for p in ctx.ramified if p <= x_max)
    codes = ctx.class_code_array(sieve)
    buckets = [("class", c.label) for c in ctx.classes]
    buckets += [("ram", p) for p in ram_primes]
    buckets.append(("total", None))

    segments = _segments(2, x_max, segment_size, cps)
    acc, snapshots, start_lo = _init_state(
        ctx, mode, buckets, segment_size, x_max, cps, state_path, resume
    )

    result = SeriesScan(ctx, x_max, mode, cps, snapshots)
    todo = [(lo, hi) for lo, hi in segments if lo >= start_lo]
    cp_set = set(cps)

    worker = _segment_exact if mode == "exact" else _segment_float

    def run(seg):
        lo, hi = seg
        return _segment_partials(ctx, sieve, codes, ram_primes, lo, hi, worker)

    def consume(seg, partial):
        lo, hi = seg
        _merge(acc, partial, mode)
        if hi in cp_set:
            snapshots[hi] = _snapshot(ctx, sieve, codes, ram_primes, hi, mode, acc)
        if state_path is not None:
            _save_state(state_path, ctx, mode, segment_size, x_max, cps, hi + 1, acc, snapshots)

    if threads <= 1 or not todo:
        for seg in todo:
            consume(seg, run(seg))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for seg, partial in zip(todo, pool.map(run, todo)):
                consume(seg, partial)
    return result


def _segments(lo: int, hi: int, size: int, checkpoints) -> list[tuple[int, int]]:
    cuts = {k * size for k in range(1, hi // size + 1)}
    cuts.update(c for c in checkpoints if lo <= c <= hi)
    cuts.add(hi)
    out = []
    start = lo
    for c in sorted(cuts):
        if c < start:
            continue
        out.append((start, c))
        start = c + 1
    return out


def _fresh_acc(buckets, mode):
    def cell():
        out = {}
        for kind in PER_N_KINDS:
            if kind in _INT_KINDS:
                out[kind] = 0
            elif mode == "exact":
                out[kind] = Fraction(0)
            else:
                out[kind] = _Neumaier()
        return out

    return {b: cell() for b in buckets}


def _init_state(ctx, mode, buckets, segment_size, x_max, cps, state_path, resume):
    if resume and state_path is not None:
        import os

        if os.path.exists(state_path):
            return _load_state(state_path, ctx, mode, segment_size, x_max, cps, buckets)
    return _fresh_acc(buckets, mode), {}, 2


def _segment_partials(ctx, sieve, codes, ram_primes, lo, hi, worker):
    """Bucket masks for one contiguous block of n, then per-bucket
    accumulation with the mode-specific worker."""
    sl = slice(lo, hi + 1)
    mu = sieve.mu_table()[sl].astype(np.int64)
    om = sieve.omega_table()[sl].astype(np.int64)
    sp = sieve.spf[sl].astype(np.int64)
    nz = mu != 0
    sel = codes[sp]
    masks = {}
    for i, cls in enumerate(ctx.classes):
        masks["class", cls.label] = nz & (sel == i)
    for p in ram_primes:
        masks["ram", p] = nz & (sp == p)
    masks["total", None] = nz
    return worker(lo, mu, om, masks)


def _segment_float(lo, mu, om, masks):
    ns = np.arange(lo, lo + len(mu), dtype=np.float64)
    muom = mu * om
    terms = {
        "mu_omega_over_n": muom / ns,
        "mu_over_n": mu / ns,
        "mu_omega_minus1_over_n": (mu * (om - 1)) / ns,
    }
    out = {}
    for key, mask in masks.items():
        idx = np.nonzero(mask)[0]
        cell = {"mu_omega_raw": int(muom[idx].sum())}
        for kind, arr in terms.items():
            cell[kind] = _neumaier_list(arr[idx].tolist())
        out[key] = cell
    return out


def _segment_exact(lo, mu, om, masks):
    out = {}
    for key, mask in masks.items():
        idx = np.nonzero(mask)[0]
        momn, mn, mm1n, raw = [], [], [], 0
        for i in idx.tolist():
            n = lo + i
            m, o = int(mu[i]), int(om[i])
            momn.append(Fraction(m * o, n))
            mn.append(Fraction(m, n))
            mm1n.append(Fraction(m * (o - 1), n))
            raw += m * o
        out[key] = {
            "mu_omega_over_n": _pairwise_sum(momn),
            "mu_over_n": _pairwise_sum(mn),
            "mu_omega_minus1_over_n": _pairwise_sum(mm1n),
            "mu_omega_raw": raw,
        }
    return out


def _merge(acc, partial, mode):
    for key, cell in partial.items():
        tgt = acc[key]
        for kind, val in cell.items():
            if kind in _INT_KINDS or mode == "exact":
                tgt[kind] = tgt[kind] + val
            else:
                s, c = val
                tgt[kind].add(s)
                tgt[kind].add(c)


def _acc_value(v):
    return v.value() if isinstance(v, _Neumaier) else v


def _snapshot(ctx, sieve, codes, ram_primes, x, mode, acc) -> Snapshot:
    ff = _floor_frac(ctx, sieve, codes, ram_primes, x, mode)
    classes, ramified = {}, {}
    for key, cell in acc.items():
        vals = {kind: _acc_value(v) for kind, v in cell.items()}
        vals.update(ff[key])
        if key[0] == "class":
            classes[key[1]] = vals
        elif key[0] == "ram":
            ramified[key[1]] = vals
        else:
            total = vals
    n2 = {lab: count_P2_in_class(ctx, lab, x, sieve) for lab in ctx.labels()}
    return Snapshot(
        x=x,
        classes=classes,
        ramified=ramified,
        total=total,
        n2_classes=n2,
        n2_ramified=count_P2_ramified(ctx, x, sieve),
        repeat_count=count_repeated_P1(x, sieve),
    )


def _floor_frac(ctx, sieve, codes, ram_primes, x, mode):
    """floor/frac-weighted sums depend on the checkpoint x, so they get a
    dedicated pass over n <= x instead of incremental maintenance."""
    sl = slice(2, x + 1)
    mu = sieve.mu_table()[sl].astype(np.int64)
    om = sieve.omega_table()[sl].astype(np.int64)
    sp = sieve.spf[sl].astype(np.int64)
    ns = np.arange(2, x + 1, dtype=np.int64)
    nz = mu != 0
    sel = codes[sp]
    muom = mu * om
    floor_terms = muom * (x // ns)
    rem = x % ns

    out = {}
    items = [(("class", c.label), nz & (sel == i)) for i, c in enumerate(ctx.classes)]
    items += [(("ram", p), nz & (sp == p)) for p in ram_primes]
    items.append((("total", None), nz))
    for key, mask in items:
        idx = np.nonzero(mask)[0]
        fl = int(floor_terms[idx].sum())
        if mode == "exact":
            fr = _pairwise_sum(
                [Fraction(int(muom[i]) * int(rem[i]), int(ns[i])) for i in idx.tolist()]
            )
        else:
            fr_terms = (muom[idx] * rem[idx]) / ns[idx].astype(np.float64)
            s, c = _neumaier_list(fr_terms.tolist())
            fr = s + c
        out[key] = {"floor_weighted": fl, "frac_weighted": fr}
    return out


# ---------------------------------------------------------------------------
# partition audit


def partition_audit(scan_result: SeriesScan, tol: float = 1e-12, raise_on_failure: bool = True):
    """Check, at every checkpoint and for every sum kind, that the class
    buckets plus the ramified slices reproduce the unconditional sum.
    Exact equality in exact mode (and for the integer-valued kinds in any
    mode); relative tolerance `tol` otherwise."""
    rows = []
    ok = True
    for x, snap in sorted(scan_result.snapshots.items()):
        for kind in ALL_KINDS:
            parts = [snap.classes[lab][kind] for lab in sorted(snap.classes)]
            parts += [snap.ramified[p][kind] for p in sorted(snap.ramified)]
            total = snap.total[kind]
            if scan_result.mode == "exact" or kind in _INT_KINDS:
                recombined = sum(parts)
                good = recombined == total
                diff = recombined - total
            else:
                recombined = fsum(parts)
                diff = recombined - float(total)
                good = abs(diff) <= tol * max(1.0, abs(float(total)))
            rows.append((x, kind, total, recombined, diff, good))
            ok = ok and good
    if not ok and raise_on_failure:
        bad = [r for r in rows if not r[5]]
        raise IntegrityError(f"partition audit failed: {bad[0]}", bad)
    return ok, rows


def splitting_check(scan_result: SeriesScan, tol: float = 1e-9, raise_on_failure: bool = False):
    """Check floor_weighted + frac_weighted = x * mu_omega_over_n for every
    bucket at every checkpoint.  Exact equality in exact mode."""
    rows = []
    ok = True
    for x, snap in sorted(scan_result.snapshots.items()):
        cells = [(lab, snap.classes[lab]) for lab in sorted(snap.classes)]
        cells += [(f"ramified:{p}", snap.ramified[p]) for p in sorted(snap.ramified)]
        cells.append(("total", snap.total))
        for name, vals in cells:
            lhs = vals["floor_weighted"] + vals["frac_weighted"]
            rhs = x * vals["mu_omega_over_n"]
            if scan_result.mode == "exact":
                good = lhs == rhs
            else:
                good = abs(lhs - rhs) <= tol * max(1.0, abs(rhs))
            rows.append((x, name, lhs, rhs, good))
            ok = ok and good
    if not ok and raise_on_failure:
        bad = [r for r in rows if not r[4]]
        raise IntegrityError(f"floor/frac splitting check failed: {bad[0]}", bad)
    return ok, rows


# ---------------------------------------------------------------------------
# standalone counting / summing operations


def fixed_prime_slice(p: int, x: int, sieve: FactorSieve, mode: str = "auto"):
    """sum over n <= x with smallest prime factor exactly p of
    mu(n)*omega(n)/n.  Fraction in exact mode, float otherwise."""
    if not 2 <= p <= x:
        raise ValueError(f"need 2 <= p <= x, got p={p}, x={x}")
    if mode == "auto":
        mode = "exact" if x <= EXACT_X_CAP else "compensated"
    sl = slice(2, x + 1)
    mu = sieve.mu_table()[sl].astype(np.int64)
    om = sieve.omega_table()[sl].astype(np.int64)
    sp = sieve.spf[sl]
    idx = np.nonzero((sp == p) & (mu != 0))[0]
    if mode == "exact":
        return _pairwise_sum(
            [Fraction(int(mu[i]) * int(om[i]), int(i) + 2) for i in idx.tolist()]
        )
    terms = (mu[idx] * om[idx]) / (idx.astype(np.float64) + 2.0)
    s, c = _neumaier_list(terms.tolist())
    return s + c


def sum_mu_in_class(ctx: GaloisContext, label: str, x: int, sieve: FactorSieve) -> int:
    """Integer sum of mu(n) over n <= x whose smallest prime factor lies
    in the given class."""
    code = ctx.code_of(label)
    codes = ctx.class_code_array(sieve)
    sl = slice(2, x + 1)
    mask = codes[sieve.spf[sl].astype(np.int64)] == code
    return int(np.sum(sieve.mu_table()[sl][mask], dtype=np.int64))


def count_P2_in_class(ctx: GaloisContext, label: str, x: int, sieve: FactorSieve) -> int:
    """#{n <= x : second-largest prime factor (strict) is in the class},
    excluding n whose largest prime factor repeats."""
    code = ctx.code_of(label)
    codes = ctx.class_code_array(sieve)
    sl = slice(2, x + 1)
    P2 = sieve.P2_strict_table()[sl].astype(np.int64)
    rep = sieve.repeated_P1_table()[sl]
    return int(np.count_nonzero((P2 > 1) & ~rep & (codes[P2] == code)))


def count_P2_ramified(ctx: GaloisContext, x: int, sieve: FactorSieve) -> int:
    codes = ctx.class_code_array(sieve)
    sl = slice(2, x + 1)
    P2 = sieve.P2_strict_table()[sl].astype(np.int64)
    rep = sieve.repeated_P1_table()[sl]
    return int(np.count_nonzero((P2 > 1) & ~rep & (codes[P2] == RAMIFIED_CODE)))


def count_P2_small_or_repeated(x: int, sieve: FactorSieve) -> int:
    """#{2 <= n <= x : omega(n) <= 1 or the largest prime factor repeats};
    the complement of the class-countable set."""
    sl = slice(2, x + 1)
    P2 = sieve.P2_strict_table()[sl]
    rep = sieve.repeated_P1_table()[sl]
    return int(np.count_nonzero((P2 == 1) | rep))


def count_repeated_P1(x: int, sieve: FactorSieve) -> int:
    """#{n <= x : P1(n)^2 | n}."""
    return int(np.count_nonzero(sieve.repeated_P1_table()[2 : x + 1]))


def psi_smooth(x: int, y: int, sieve: FactorSieve) -> int:
    """#{n <= x : largest prime factor <= y}; n = 1 counts."""
    if not 1 <= y <= x:
        raise ValueError(f"need 1 <= y <= x, got y={y}, x={x}")
    if x > sieve.limit:
        raise ValueError(f"x = {x} exceeds sieve limit {sieve.limit}")
    return int(np.count_nonzero(sieve.P1_table()[1 : x + 1] <= y))


def count_P2_below(x: int, y: int, sieve: FactorSieve) -> int:
    """#{n <= x : second-largest prime factor (strict) <= y}."""
    if not 1 <= y <= x:
        raise ValueError(f"need 1 <= y <= x, got y={y}, x={x}")
    return int(np.count_nonzero(sieve.P2_strict_table()[1 : x + 1] <= y))


# ---------------------------------------------------------------------------
# Dickman rho

_RHO_STEPS_PER_UNIT = 10_000
_RHO_MAX = 20


@lru_cache(maxsize=1)
def _dickman_values() -> tuple[float, ...]:
    """rho on a uniform grid of step 1e-4 over [0, 20], via the delay
    integral form a rho(a) = integral_{a-1}^{a} rho(t) dt.

    The unit-window integral I(a) is advanced with a sliding trapezoid
    update and re-summed from scratch at every integer boundary; all
    quantities involved are positive and of the same scale as rho(a)
    itself, so the error stays *relative* and rho remains positive and
    strictly decreasing all the way down to rho(20) ~ 1e-29 (a naive ODE
    march of rho' = -rho(a-1)/a loses to absolute rounding noise there).
    """
    S = _RHO_STEPS_PER_UNIT
    h = 1.0 / S
    vals = [1.0] * (S + 1)
    window = fsum(vals[:S]) * h + (vals[S] - vals[0]) * h / 2  # I(1) = 1
    for i in range(S, _RHO_MAX * S):
        a1 = (i + 1) / S
        # trapezoid update of I over [a1 - 1, a1]; the new endpoint value
        # rho(a1) = I(a1)/a1 appears on both sides -- solve for it.
        partial = window + h / 2 * vals[i] - h / 2 * (vals[i - S] + vals[i + 1 - S])
        nxt = partial / (a1 - h / 2)
        vals.append(nxt)
        window = partial + h / 2 * nxt
        if (i + 1) % S == 0:
            window = fsum(vals[i + 2 - S : i + 1]) * h
            window += (vals[i + 1 - S] + vals[i + 1]) * h / 2
    return tuple(vals)


def dickman_rho(alpha: float) -> float:
    """Dickman's rho: 1 on [0, 1], then the solution of the delay
    integral equation rho(a) = 1 - integral_1^a rho(u-1)/u du."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if alpha > _RHO_MAX:
        raise ValueError(f"alpha must be <= {_RHO_MAX}, got {alpha}")
    if alpha <= 1:
        return 1.0
    S = _RHO_STEPS_PER_UNIT
    vals = _dickman_values()
    pos = alpha * S
    i = int(pos)
    if i >= len(vals) - 1:
        return vals[-1]
    frac = pos - i
    return vals[i] * (1 - frac) + vals[i + 1] * frac


def dickman_grid() -> tuple[np.ndarray, np.ndarray]:
    """(alphas, rho values) on the internal grid, for plotting and for
    monotonicity checks."""
    vals = np.array(_dickman_values())
    alphas = np.arange(len(vals)) / _RHO_STEPS_PER_UNIT
    return alphas, vals


# ---------------------------------------------------------------------------
# scan state persistence (resume support)

_STATE_HEADER = "artinsums-scan v1"


def _fmt_value(v) -> str:
    if isinstance(v, _Neumaier):
        return f"neumaier {v.s.hex()} {v.c.hex()}"
    if isinstance(v, Fraction):
        return f"frac {v.numerator}/{v.denominator}"
    if isinstance(v, bool):
        raise TypeError("unexpected bool")
    if isinstance(v, int):
        return f"int {v}"
    return f"float {float(v).hex()}"


def _parse_value(s: str):
    tag, _, rest = s.partition(" ")
    if tag == "neumaier":
        a, b = rest.split()
        acc = _Neumaier(float.fromhex(a), float.fromhex(b))
        return acc
    if tag == "frac":
        num, den = rest.split("/")
        return Fraction(int(num), int(den))
    if tag == "int":
        return int(rest)
    if tag == "float":
        return float.fromhex(rest)
    raise IntegrityError(f"bad value tag {tag!r}")


def _bucket_key_str(key) -> str:
    if key[0] == "class":
        return f"class:{key[1]}"
    if key[0] == "ram":
        return f"ram:{key[1]}"
    return "total"


def _save_state(path, ctx, mode, segment_size, x_max, cps, next_lo, acc, snapshots):
    lines = [
        _STATE_HEADER,
        f"context = {ctx.spec_string()}",
        f"mode = {mode}",
        f"segment_size = {segment_size}",
        f"x_max = {x_max}",
        "checkpoints = " + ",".join(str(c) for c in cps),
        f"next_lo = {next_lo}",
    ]
    for key in sorted(acc, key=_bucket_key_str):
        for kind in PER_N_KINDS:
            lines.append(f"acc.{_bucket_key_str(key)}.{kind} = {_fmt_value(acc[key][kind])}")
    for x in sorted(snapshots):
        snap = snapshots[x]
        for lab in sorted(snap.classes):
            for kind, v in sorted(snap.classes[lab].items()):
                lines.append(f"snap.{x}.class:{lab}.{kind} = {_fmt_value(v)}")
        for p in sorted(snap.ramified):
            for kind, v in sorted(snap.ramified[p].items()):
                lines.append(f"snap.{x}.ram:{p}.{kind} = {_fmt_value(v)}")
        for kind, v in sorted(snap.total.items()):
            lines.append(f"snap.{x}.total.{kind} = {_fmt_value(v)}")
        for lab in sorted(snap.n2_classes):
            lines.append(f"snap.{x}.n2:{lab} = int {snap.n2_classes[lab]}")
        lines.append(f"snap.{x}.n2_ramified = int {snap.n2_ramified}")
        lines.append(f"snap.{x}.repeat_count = int {snap.repeat_count}")
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    with open(path, "w") as fh:
        fh.write(body)
        fh.write(f"sha256 = {digest}\n")


def _load_state(path, ctx, mode, segment_size, x_max, cps, buckets):
    with open(path) as fh:
        text = fh.read()
    body, _, tail = text.rpartition("sha256 = ")
    digest = tail.strip()
    if hashlib.sha256(body.encode()).hexdigest() != digest:
        raise IntegrityError(f"{path}: state hash mismatch")
    lines = body.splitlines()
    if not lines or lines[0] != _STATE_HEADER:
        raise IntegrityError(f"{path}: unrecognized state header")
    kv = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        key, _, val = line.partition(" = ")
        kv[key] = val
    expect = {
        "context": ctx.spec_string(),
        "mode": mode,
        "segment_size": str(segment_size),
        "x_max": str(x_max),
        "checkpoints": ",".join(str(c) for c in cps),
    }
    for k, want in expect.items():
        if kv.get(k) != want:
            raise IntegrityError(
                f"{path}: state {k} mismatch (file {kv.get(k)!r}, requested {want!r})"
            )
    acc = _fresh_acc(buckets, mode)
    by_str = {_bucket_key_str(b): b for b in buckets}
    snapshots: dict[int, Snapshot] = {}

    def snap_for(x):
        if x not in snapshots:
            snapshots[x] = Snapshot(x, {}, {}, {}, {}, 0, 0)
        return snapshots[x]

    for key, val in kv.items():
        if key.startswith("acc."):
            _, bstr, kind = key.split(".", 2)
            acc[by_str[bstr]][kind] = _parse_value(val)
        elif key.startswith("snap."):
            _, xs, rest = key.split(".", 2)
            snap = snap_for(int(xs))
            if rest.startswith("class:"):
                bstr, kind = rest[6:].rsplit(".", 1)
                snap.classes.setdefault(bstr, {})[kind] = _final(_parse_value(val))
            elif rest.startswith("ram:"):
                bstr, kind = rest[4:].rsplit(".", 1)
                snap.ramified.setdefault(int(bstr), {})[kind] = _final(_parse_value(val))
            elif rest.startswith("total."):
                snap.total[rest[6:]] = _final(_parse_value(val))
            elif rest.startswith("n2:"):
                snap.n2_classes[rest[3:]] = _parse_value(val)
            elif rest == "n2_ramified":
                snap.n2_ramified = _parse_value(val)
            elif rest == "repeat_count":
                snap.repeat_count = _parse_value(val)
    return acc, snapshots, int(kv["next_lo"])


def _final(v):
    return v.value() if isinstance(v, _Neumaier) else v
