"""Command-line surface.

Commands: sieve-build, scan, reproduce-table, verify, dickman, smooth,
classify.  Global flags: --sieve-cache, --threads, --format, --out,
--config.  A config file holds plain ``key = value`` lines (keys are the
long option names); command-line flags override it.  The environment
variable ARTINSUMS_CACHE_DIR supplies a default directory for sieve
caches.

Exit codes: 0 success, 2 usage error, 3 integrity error, 4 resource
error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import duality, series
from .errors import IntegrityError
from .galois import GaloisContext, new_cyclotomic, new_splitting_field
from .sieve import DEFAULT_LIMIT, FactorSieve

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INTEGRITY = 3
EXIT_RESOURCE = 4

CACHE_DIR_ENV = "ARTINSUMS_CACHE_DIR"

# Previously reported values of sum(mu(n)*omega(n)/n) over n <= x with the
# smallest prime factor in each class, splitting field of x^3+x+1, at
# x = 20000 / 40000 / 80000; reproduce-table reports deviations from these.
TABLE_CHECKPOINTS = (20_000, 40_000, 80_000)
TABLE_REFERENCE = {
    "3": ("3-cycles", (0.250, 0.254, 0.265)),
    "1+2": ("2-cycles", (0.188, 0.237, 0.279)),
    "1+1+1": ("identity", (-0.026, -0.008, 0.009)),
}
TABLE_TOLERANCE = 0.005


@dataclass
class RunConfig:
    command: str
    context: GaloisContext | None = None
    class_labels: list[str] = field(default_factory=list)
    x_max: int = 0
    checkpoints: tuple[int, ...] = ()
    mode: str = "compensated"
    sieve_cache: str | None = None
    out_format: str = "csv"
    out_path: str | None = None
    seed: int = 1
    threads: int = 1


@dataclass
class TableReport:
    """Rows keyed by class label, columns by checkpoint x; rounded cells
    mirror a 3-decimal presentation, unrounded values kept alongside."""

    checkpoints: tuple[int, ...]
    rows: dict  # label -> {"name", "values", "rounded", "reference", "deviation"}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args, sys.argv[1:] if argv is None else argv)
        return args.func(args)
    except BrokenPipeError:
        return EXIT_OK
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrityError as exc:
        print(f"integrity error: {exc.args[0]}", file=sys.stderr)
        return EXIT_INTEGRITY
    except MemoryError:
        print("error: out of memory", file=sys.stderr)
        return EXIT_RESOURCE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="artinsums",
        description="Class-restricted Mobius partial sums and their exact duality checks.",
    )
    parser.add_argument("--config", help="config file with 'key = value' lines")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, context=True):
        p.add_argument("--sieve-cache", help="sieve cache file (built if missing)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", dest="out_format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", dest="out_path", help="output file (default stdout)")
        if context:
            p.add_argument("--cyclotomic", type=int, metavar="K", help="cyclotomic context Q(zeta_K)")
            p.add_argument(
                "--poly",
                metavar="C0,C1,...,1",
                help="splitting-field context, integer coefficients lowest degree first",
            )

    p = sub.add_parser("sieve-build", help="build a smallest-prime-factor sieve cache")
    common(p, context=False)
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.set_defaults(func=_cmd_sieve_build)

    p = sub.add_parser("scan", help="accumulate all class-keyed sums up to x")
    common(p)
    p.add_argument("--xmax", type=int, required=True)
    p.add_argument("--checkpoints", help="comma-separated checkpoint x values")
    p.add_argument("--mode", choices=("exact", "compensated"), default="compensated")
    p.add_argument("--class", dest="class_label", help="restrict output to one class label")
    p.add_argument("--segment-size", type=int, default=series.DEFAULT_SEGMENT)
    p.add_argument("--state", help="checkpoint state file for resume")
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("reproduce-table", help="reproduce the published x^3+x+1 sum table")
    common(p, context=False)
    p.set_defaults(func=_cmd_reproduce_table)

    p = sub.add_parser("verify", help="run the exact duality/identity suites")
    common(p, context=False)
    p.add_argument("--nmax", type=int, default=5000)
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--weights", type=int, default=5)
    p.add_argument("--corrupt-mu", type=int, help=argparse.SUPPRESS)  # test hook
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("duality-test", help="exact check of the four duality identities")
    common(p, context=False)
    p.add_argument("--nmax", type=int, default=5000)
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=_cmd_duality_test)

    p = sub.add_parser("dickman", help="tabulate the smooth-density function rho")
    common(p, context=False)
    p.add_argument("--grid", help="comma-separated alpha values")
    p.add_argument("--max", dest="alpha_max", type=float, default=10.0)
    p.add_argument("--step", type=float, default=0.5)
    p.set_defaults(func=_cmd_dickman)

    p = sub.add_parser("smooth", help="tabulate Psi(x, y) and its decay envelope")
    common(p, context=False)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", help="comma-separated y values")
    p.add_argument("--alpha", help="comma-separated alpha values (y = x^(1/alpha))")
    p.set_defaults(func=_cmd_smooth)

    p = sub.add_parser("classify", help="Frobenius class of given primes")
    common(p)
    p.add_argument("primes", nargs="*", type=int)
    p.add_argument("--list", action="store_true", help="list classes with densities")
    p.set_defaults(func=_cmd_classify)

    return parser


_CONFIG_FLAGS = {
    "sieve_cache": "--sieve-cache",
    "threads": "--threads",
    "out_format": "--format",
    "out_path": "--out",
    "mode": "--mode",
    "segment_size": "--segment-size",
}


def _apply_config_file(args, argv) -> None:
    """Config file supplies defaults; a flag given explicitly on the command
    line always wins over the config file."""
    path = getattr(args, "config", None)
    if not path:
        return
    overrides = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ValueError(f"{path}: malformed config line {raw.strip()!r}")
            key = key.strip().replace("-", "_")
            # config keys use the long option names; a few differ from the
            # argparse destinations
            key = {"format": "out_format", "out": "out_path"}.get(key, key)
            overrides[key] = val.strip()
    casts = {"threads": int, "segment_size": int}
    explicit = {a.split("=", 1)[0] for a in argv if a.startswith("--")}
    for key, val in overrides.items():
        if not hasattr(args, key):
            continue
        if _CONFIG_FLAGS.get(key) in explicit:
            continue
        setattr(args, key, casts.get(key, str)(val))


# ---------------------------------------------------------------------------
# helpers


def _context_from(args) -> GaloisContext:
    cyc = getattr(args, "cyclotomic", None)
    poly = getattr(args, "poly", None)
    if (cyc is None) == (poly is None):
        raise ValueError("exactly one of --cyclotomic K or --poly COEFFS is required")
    if cyc is not None:
        return new_cyclotomic(cyc)
    return new_splitting_field(parse_poly(poly))


def parse_poly(text: str) -> list[int]:
    try:
        coeffs = [int(c) for c in text.split(",")]
    except ValueError:
        raise ValueError(f"bad polynomial spec {text!r}") from None
    if len(coeffs) < 2:
        raise ValueError("polynomial needs at least two coefficients")
    return coeffs


def _get_sieve(args, needed: int) -> FactorSieve:
    path = getattr(args, "sieve_cache", None)
    if not path:
        cache_dir = os.environ.get(CACHE_DIR_ENV)
        if cache_dir:
            path = os.path.join(cache_dir, f"spf-{needed}.sieve")
    if path and os.path.exists(path):
        sieve = FactorSieve.load(path)
        if sieve.limit < needed:
            raise ValueError(
                f"sieve cache {path} has limit {sieve.limit}, need {needed}"
            )
        return sieve
    sieve = FactorSieve(needed)
    if path:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        sieve.save(path)
    return sieve


def _format_cell(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_cell(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return v


def _emit(rows, header, args) -> None:
    """Write rows as CSV or a JSON list of objects; floats keep full
    precision so re-parsing is bit-exact."""
    out_path = getattr(args, "out_path", None)
    fh = open(out_path, "w", newline="") if out_path else sys.stdout
    try:
        if args.out_format == "json":
            payload = [dict(zip(header, (_json_cell(v) for v in row))) for row in rows]
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        else:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_format_cell(v) for v in row])
    finally:
        if out_path:
            fh.close()


# ---------------------------------------------------------------------------
# commands


def _cmd_sieve_build(args) -> int:
    path = args.sieve_cache or args.out_path
    if not path:
        cache_dir = os.environ.get(CACHE_DIR_ENV)
        if not cache_dir:
            raise ValueError("sieve-build needs --sieve-cache, --out, or " + CACHE_DIR_ENV)
        path = os.path.join(cache_dir, f"spf-{args.limit}.sieve")
    sieve = FactorSieve(args.limit)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    sieve.save(path)
    print(f"wrote sieve with limit {sieve.limit} to {path}")
    return EXIT_OK


def _cmd_scan(args) -> int:
    ctx = _context_from(args)
    checkpoints = (
        [int(c) for c in args.checkpoints.split(",")] if args.checkpoints else None
    )
    sieve = _get_sieve(args, args.xmax)
    if args.class_label is not None:
        ctx.code_of(args.class_label)  # raises on unknown label
    result = series.scan(
        ctx,
        args.xmax,
        checkpoints=checkpoints,
        mode=args.mode,
        sieve=sieve,
        threads=args.threads,
        segment_size=args.segment_size,
        state_path=args.state,
        resume=args.resume,
    )
    rows = []
    for x in result.checkpoints:
        snap = result.snapshots[x]
        for lab in sorted(snap.classes):
            if args.class_label is not None and lab != args.class_label:
                continue
            for kind in series.ALL_KINDS:
                rows.append((x, lab, kind, snap.classes[lab][kind]))
        if args.class_label is None:
            for p in sorted(snap.ramified):
                for kind in series.ALL_KINDS:
                    rows.append((x, f"ramified:{p}", kind, snap.ramified[p][kind]))
            for kind in series.ALL_KINDS:
                rows.append((x, "total", kind, snap.total[kind]))
    _emit(rows, ("x", "class", "sum_kind", "value"), args)
    return EXIT_OK


def reproduce_table(sieve: FactorSieve, threads: int = 1) -> TableReport:
    ctx = new_splitting_field([1, 1, 0, 1])
    result = series.scan(
        ctx,
        TABLE_CHECKPOINTS[-1],
        checkpoints=TABLE_CHECKPOINTS,
        mode="compensated",
        sieve=sieve,
        threads=threads,
    )
    rows = {}
    for label, (name, ref) in TABLE_REFERENCE.items():
        values = tuple(
            result.snapshots[x].classes[label]["mu_omega_over_n"]
            for x in TABLE_CHECKPOINTS
        )
        rounded = tuple(round(v, 3) for v in values)
        deviation = tuple(abs(v - r) for v, r in zip(values, ref))
        rows[label] = {
            "name": name,
            "values": values,
            "rounded": rounded,
            "reference": ref,
            "deviation": deviation,
        }
    return TableReport(TABLE_CHECKPOINTS, rows)


def _cmd_reproduce_table(args) -> int:
    sieve = _get_sieve(args, TABLE_CHECKPOINTS[-1])
    report = reproduce_table(sieve, threads=args.threads)
    width = max(len(r["name"]) for r in report.rows.values())
    head = " | ".join(f"x<={x}" for x in report.checkpoints)
    print(f"{'class':<{width}} | {head}")
    for label, row in report.rows.items():
        cells = " | ".join(f"{v:>8.3f}" for v in row["rounded"])
        print(f"{row['name']:<{width}} | {cells}")
    print()
    ok = True
    for label, row in report.rows.items():
        dev = max(row["deviation"])
        good = dev <= TABLE_TOLERANCE
        ok = ok and good
        print(
            f"{row['name']:<{width}}  max deviation from reference "
            f"{dev:.5f}  [{'ok' if good else 'OUT OF TOLERANCE'}]"
        )
    rows = []
    for label, row in report.rows.items():
        for x, value, rounded, ref, dev in zip(
            report.checkpoints, row["values"], row["rounded"], row["reference"], row["deviation"]
        ):
            rows.append((x, label, value, rounded, ref, dev))
    if args.out_path:
        _emit(rows, ("x", "class", "value", "rounded", "reference", "deviation"), args)
    return EXIT_OK if ok else 1


class _CorruptedMuSieve(FactorSieve):
    """Test hook: negates mu at one chosen n, to prove the verify command
    actually detects broken inputs."""

    def __init__(self, base: FactorSieve, bad_n: int):
        super().__init__(base.limit, _spf=base.spf)
        self._bad_n = bad_n

    def arith_fns(self, n):
        mu, omega, big = super().arith_fns(n)
        if n == self._bad_n:
            mu = -mu if mu else 1
        return mu, omega, big


def _cmd_verify(args) -> int:
    nmax = args.nmax
    sieve = _get_sieve(args, max(nmax, 100))
    if args.corrupt_mu:
        sieve = _CorruptedMuSieve(sieve, args.corrupt_mu)
    weights = [duality.random_weight(args.seed + i) for i in range(args.weights)]

    def fail(summary: str, detail: dict) -> int:
        print(f"FAIL {summary}")
        print(json.dumps(detail))
        return 1

    # the four divisor-sum duality identities, exact
    for w in weights:
        for n in range(2, nmax + 1):
            for rep in duality.check_all_identities(sieve, n, args.kmax, w):
                if not rep.passed:
                    return fail(
                        f"duality identity {rep.identity} (k={rep.k}) at n={rep.n}",
                        {
                            "n": rep.n,
                            "identity": rep.identity,
                            "k": rep.k,
                            "weight": w.name,
                            "lhs": str(rep.lhs),
                            "rhs": str(rep.rhs),
                        },
                    )
    print(f"PASS duality identities 1-4, k<={args.kmax}, n<={nmax}, {len(weights)} weights")

    # Mobius-inverted second-order identity, exact
    for w in weights:
        for n in range(2, nmax + 1):
            rep = duality.check_inversion(sieve, n, w)
            if not rep.passed:
                return fail(
                    f"inversion identity at n={rep.n}",
                    {"n": rep.n, "weight": w.name, "lhs": str(rep.lhs), "rhs": str(rep.rhs)},
                )
    print(f"PASS Mobius-inverted identity, n<={nmax}")

    # divisor-sum rearrangement (hyperbola split)
    x_hyp = min(nmax, 2000)
    for w in weights:
        lhs, rhs = duality.hyperbola_check(sieve, x_hyp, w)
        if lhs != rhs:
            return fail(
                f"hyperbola rearrangement at x={x_hyp}",
                {"x": x_hyp, "weight": w.name, "lhs": str(lhs), "rhs": str(rhs)},
            )
    print(f"PASS hyperbola rearrangement, x={x_hyp}")

    # exact scans: floor/frac splitting + partition audit
    x_audit = min(nmax, series.EXACT_X_CAP)
    for ctx in (new_cyclotomic(4), new_splitting_field([1, 1, 0, 1])):
        result = series.scan(ctx, x_audit, mode="exact", sieve=sieve)
        ok, rows = series.splitting_check(result)
        if not ok:
            bad = next(r for r in rows if not r[4])
            return fail(
                f"floor/frac split for {ctx.describe()}",
                {"x": bad[0], "bucket": bad[1], "lhs": str(bad[2]), "rhs": str(bad[3])},
            )
        ok, rows = series.partition_audit(result, raise_on_failure=False)
        if not ok:
            bad = next(r for r in rows if not r[5])
            return fail(
                f"partition audit for {ctx.describe()}",
                {"x": bad[0], "kind": bad[1], "total": str(bad[2]), "buckets": str(bad[3])},
            )
        print(f"PASS exact floor/frac split and partition audit, {ctx.describe()}, x={x_audit}")
    print("all verification suites passed")
    return EXIT_OK


def _cmd_duality_test(args) -> int:
    sieve = _get_sieve(args, max(args.nmax, 100))
    weight = duality.random_weight(args.seed)
    checked = 0
    for n in range(2, args.nmax + 1):
        for rep in duality.check_all_identities(sieve, n, args.kmax, weight):
            checked += 1
            if not rep.passed:
                print(
                    f"FAIL duality identity {rep.identity} (k={rep.k}) at n={rep.n}"
                )
                print(
                    json.dumps(
                        {
                            "n": rep.n,
                            "identity": rep.identity,
                            "k": rep.k,
                            "weight": weight.name,
                            "lhs": str(rep.lhs),
                            "rhs": str(rep.rhs),
                        }
                    )
                )
                return 1
    print(
        f"PASS {checked} identity instances, n<={args.nmax}, k<={args.kmax}, "
        f"weight {weight.name}"
    )
    return EXIT_OK


def _cmd_dickman(args) -> int:
    if args.grid:
        alphas = [float(a) for a in args.grid.split(",")]
    else:
        n = int(round(args.alpha_max / args.step))
        alphas = [i * args.step for i in range(n + 1)]
    rows = [(a, series.dickman_rho(a)) for a in alphas]
    _emit(rows, ("alpha", "rho"), args)
    return EXIT_OK


def _cmd_smooth(args) -> int:
    sieve = _get_sieve(args, args.x)
    if args.y:
        ys = [int(y) for y in args.y.split(",")]
    elif args.alpha:
        ys = [max(2, int(round(args.x ** (1.0 / float(a))))) for a in args.alpha.split(",")]
    else:
        raise ValueError("smooth needs --y or --alpha")
    rows = []
    for y in ys:
        count = series.psi_smooth(args.x, y, sieve)
        alpha = math.log(args.x) / math.log(y) if y > 1 else float("inf")
        ratio = count * math.exp(alpha / 2) / args.x
        rows.append((args.x, y, alpha, count, ratio))
    _emit(rows, ("x", "y", "alpha", "psi", "envelope_ratio"), args)
    return EXIT_OK


def _cmd_classify(args) -> int:
    ctx = _context_from(args)
    if args.list or not args.primes:
        rows = [
            (c.label, c.size, f"{c.density.numerator}/{c.density.denominator}")
            for c in ctx.classes
        ]
        _emit(rows, ("class", "size", "density"), args)
        return EXIT_OK
    rows = [(p, str(ctx.classify(p))) for p in args.primes]
    _emit(rows, ("prime", "class"), args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
