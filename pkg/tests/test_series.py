"""Series engine: exact-scan oracles, partition/splitting audits,
determinism, resume, counting operations against enumeration, Dickman rho
against quadrature."""

import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from artinsums import series
from artinsums.errors import IntegrityError
from artinsums.galois import new_cyclotomic


# -- enumeration oracles ----------------------------------------------------


def enum_bucket_sum(sieve, ctx, x, label=None, ramified_p=None):
    """Sum mu(n)*omega(n)/n over n <= x routed by the class of the
    smallest prime factor, by direct per-n evaluation."""
    total = Fraction(0)
    for n in range(2, x + 1):
        mu, om, _ = sieve.arith_fns(n)
        if mu == 0:
            continue
        p1 = sieve.factorize(n)[0][0]
        out = ctx.classify(p1)
        if ramified_p is not None:
            if out.is_ramified and p1 == ramified_p:
                total += Fraction(mu * om, n)
        elif label is None:
            total += Fraction(mu * om, n)
        elif not out.is_ramified and out.label == label:
            total += Fraction(mu * om, n)
    return total


def enum_n2(sieve, ctx, x, label):
    count = 0
    for n in range(2, x + 1):
        fac = sieve.factorize(n)
        if len(fac) < 2 or fac[-1][1] >= 2:
            continue
        out = ctx.classify(fac[-2][0])
        if not out.is_ramified and out.label == label:
            count += 1
    return count


# -- exact scans ------------------------------------------------------------


def test_exact_scan_x10_cyclotomic4(sieve_small, ctx_c4):
    r = series.scan(ctx_c4, 10, mode="exact", sieve=sieve_small)
    snap = r.snapshots[10]
    # terms: n=3 gives -1/3, n=7 gives -1/7 (n=9 has mu=0)
    assert snap.classes["3 mod 4"]["mu_omega_over_n"] == Fraction(-10, 21)
    assert snap.classes["1 mod 4"]["mu_omega_over_n"] == Fraction(-1, 5)
    # even squarefree n <= 10: -1/2 + 1/3 + 1/5 = 1/30
    assert snap.ramified[2]["mu_omega_over_n"] == Fraction(1, 30)
    assert snap.total["mu_omega_over_n"] == Fraction(-9, 14)


def test_exact_scan_x2_single_bucket(sieve_small, ctx_c4, ctx_cubic):
    for ctx in (ctx_c4, ctx_cubic):
        snap = series.scan(ctx, 2, mode="exact", sieve=sieve_small).snapshots[2]
        out = ctx.classify(2)
        if out.is_ramified:
            assert snap.ramified[2]["mu_omega_over_n"] == Fraction(-1, 2)
        else:
            assert snap.classes[out.label]["mu_omega_over_n"] == Fraction(-1, 2)
        assert snap.total["mu_omega_over_n"] == Fraction(-1, 2)


def test_exact_scan_matches_enumeration(sieve_small, ctx_cubic):
    x = 300
    r = series.scan(ctx_cubic, x, mode="exact", sieve=sieve_small)
    snap = r.snapshots[x]
    for lab in ctx_cubic.labels():
        assert snap.classes[lab]["mu_omega_over_n"] == enum_bucket_sum(
            sieve_small, ctx_cubic, x, label=lab
        )
    assert snap.ramified[31]["mu_omega_over_n"] == enum_bucket_sum(
        sieve_small, ctx_cubic, x, ramified_p=31
    )
    assert snap.total["mu_omega_over_n"] == enum_bucket_sum(sieve_small, ctx_cubic, x)


def test_kind_identity_mu_omega_minus1(sieve_small, ctx_c4):
    # MuOmegaMinus1OverN = MuOmegaOverN - MuOverN, bucket by bucket
    r = series.scan(ctx_c4, 500, mode="exact", sieve=sieve_small)
    snap = r.snapshots[500]
    cells = list(snap.classes.values()) + list(snap.ramified.values()) + [snap.total]
    for vals in cells:
        assert (
            vals["mu_omega_minus1_over_n"]
            == vals["mu_omega_over_n"] - vals["mu_over_n"]
        )


def test_checkpoints_are_prefixes(sieve_small, ctx_cubic):
    # a checkpoint snapshot equals a fresh scan stopped at that x
    r = series.scan(ctx_cubic, 400, checkpoints=(100, 250), mode="exact", sieve=sieve_small)
    for x in (100, 250):
        fresh = series.scan(ctx_cubic, x, mode="exact", sieve=sieve_small)
        for lab in ctx_cubic.labels():
            assert (
                r.snapshots[x].classes[lab]["mu_omega_over_n"]
                == fresh.snapshots[x].classes[lab]["mu_omega_over_n"]
            )


def test_scan_validation(sieve_small, ctx_c4):
    with pytest.raises(ValueError):
        series.scan(ctx_c4, 10, mode="exact", sieve=None)
    with pytest.raises(ValueError):
        series.scan(ctx_c4, 1, sieve=sieve_small)
    with pytest.raises(ValueError):
        series.scan(ctx_c4, 200_000, sieve=sieve_small)  # beyond sieve limit
    with pytest.raises(ValueError):
        series.scan(ctx_c4, 10, mode="nearest", sieve=sieve_small)
    with pytest.raises(ValueError):
        series.scan(ctx_c4, 20_000, mode="exact", sieve=sieve_small)  # exact cap
    with pytest.raises(ValueError):
        series.scan(ctx_c4, 100, checkpoints=(150,), sieve=sieve_small)


# -- audits -----------------------------------------------------------------


def test_partition_audit_exact(sieve_small, ctx_c4, ctx_cubic):
    for ctx in (ctx_c4, ctx_cubic):
        r = series.scan(ctx, 2000, checkpoints=(500,), mode="exact", sieve=sieve_small)
        ok, rows = series.partition_audit(r)
        assert ok
        assert all(row[5] for row in rows)


def test_partition_audit_compensated(sieve_small, ctx_cubic):
    r = series.scan(ctx_cubic, 50_000, mode="compensated", sieve=sieve_small)
    ok, _ = series.partition_audit(r, tol=1e-12)
    assert ok


def test_partition_audit_detects_corruption(sieve_small, ctx_c4):
    r = series.scan(ctx_c4, 100, mode="exact", sieve=sieve_small)
    r.snapshots[100].classes["1 mod 4"]["mu_omega_over_n"] += Fraction(1, 7)
    with pytest.raises(IntegrityError):
        series.partition_audit(r)
    ok, rows = series.partition_audit(r, raise_on_failure=False)
    assert not ok


def test_splitting_check_exact(sieve_small, ctx_c4, ctx_cubic):
    for ctx in (ctx_c4, ctx_cubic):
        for x in (100, 1000):
            r = series.scan(ctx, x, mode="exact", sieve=sieve_small)
            ok, rows = series.splitting_check(r)
            assert ok
            for row_x, name, lhs, rhs, good in rows:
                assert lhs == rhs


def test_compensated_matches_exact(sieve_small, ctx_cubic):
    for x in (1000, 10_000):
        ex = series.scan(ctx_cubic, x, mode="exact", sieve=sieve_small).snapshots[x]
        co = series.scan(ctx_cubic, x, mode="compensated", sieve=sieve_small).snapshots[x]
        for lab in ctx_cubic.labels():
            for kind in series.PER_N_KINDS:
                e = ex.classes[lab][kind]
                c = co.classes[lab][kind]
                if kind in series._INT_KINDS:
                    assert e == c
                else:
                    assert abs(float(e) - c) <= 1e-12 * max(1.0, abs(float(e)))


# -- determinism and resume -------------------------------------------------


def test_thread_determinism(sieve_small, ctx_cubic):
    runs = [
        series.scan(ctx_cubic, 30_000, checkpoints=(10_000,), sieve=sieve_small, threads=t)
        for t in (1, 2, 8)
    ]
    base = runs[0]
    for other in runs[1:]:
        for x in base.snapshots:
            for lab in ctx_cubic.labels():
                for kind in series.ALL_KINDS:
                    assert (
                        base.snapshots[x].classes[lab][kind]
                        == other.snapshots[x].classes[lab][kind]
                    )
            for kind in series.ALL_KINDS:
                assert base.snapshots[x].total[kind] == other.snapshots[x].total[kind]


def test_segments_partition_range():
    segs = series._segments(2, 1000, 256, (300, 700))
    assert segs[0][0] == 2
    assert segs[-1][1] == 1000
    for (lo1, hi1), (lo2, hi2) in zip(segs, segs[1:]):
        assert lo2 == hi1 + 1
    assert {300, 700} <= {hi for _, hi in segs}


def test_state_roundtrip(tmp_path, sieve_small, ctx_cubic):
    state = tmp_path / "scan.state"
    r1 = series.scan(
        ctx_cubic, 5000, checkpoints=(2000,), sieve=sieve_small, state_path=state
    )
    assert state.exists()
    r2 = series.scan(
        ctx_cubic,
        5000,
        checkpoints=(2000,),
        sieve=sieve_small,
        state_path=state,
        resume=True,
    )
    for x in (2000, 5000):
        for lab in ctx_cubic.labels():
            for kind in series.ALL_KINDS:
                assert (
                    r1.snapshots[x].classes[lab][kind]
                    == r2.snapshots[x].classes[lab][kind]
                )


def test_resume_after_interruption(tmp_path, sieve_small, ctx_cubic, monkeypatch):
    state = tmp_path / "scan.state"
    reference = series.scan(
        ctx_cubic, 9000, checkpoints=(3000,), sieve=sieve_small, segment_size=1024
    )

    real = series._segment_partials
    calls = {"n": 0}

    def flaky(*args, **kwargs):
        calls["n"] += 1
        if calls["n"] > 3:
            raise KeyboardInterrupt
        return real(*args, **kwargs)

    monkeypatch.setattr(series, "_segment_partials", flaky)
    with pytest.raises(KeyboardInterrupt):
        series.scan(
            ctx_cubic,
            9000,
            checkpoints=(3000,),
            sieve=sieve_small,
            segment_size=1024,
            state_path=state,
        )
    monkeypatch.setattr(series, "_segment_partials", real)
    resumed = series.scan(
        ctx_cubic,
        9000,
        checkpoints=(3000,),
        sieve=sieve_small,
        segment_size=1024,
        state_path=state,
        resume=True,
    )
    for x in (3000, 9000):
        for lab in ctx_cubic.labels():
            for kind in series.ALL_KINDS:
                assert (
                    reference.snapshots[x].classes[lab][kind]
                    == resumed.snapshots[x].classes[lab][kind]
                ), (x, lab, kind)


def test_state_hash_mismatch(tmp_path, sieve_small, ctx_cubic):
    state = tmp_path / "scan.state"
    series.scan(ctx_cubic, 1000, sieve=sieve_small, state_path=state)
    text = state.read_text()
    state.write_text(text.replace("next_lo", "next_hi", 1))
    with pytest.raises(IntegrityError):
        series.scan(
            ctx_cubic, 1000, sieve=sieve_small, state_path=state, resume=True
        )


def test_state_parameter_mismatch(tmp_path, sieve_small, ctx_cubic, ctx_c4):
    state = tmp_path / "scan.state"
    series.scan(ctx_cubic, 1000, sieve=sieve_small, state_path=state)
    with pytest.raises(IntegrityError):
        series.scan(ctx_c4, 1000, sieve=sieve_small, state_path=state, resume=True)
    with pytest.raises(IntegrityError):
        series.scan(
            ctx_cubic, 2000, sieve=sieve_small, state_path=state, resume=True
        )


# -- standalone operations --------------------------------------------------


def test_fixed_prime_slice_oracles(sieve_small):
    assert series.fixed_prime_slice(2, 10, sieve_small) == Fraction(1, 30)
    assert series.fixed_prime_slice(7, 10, sieve_small) == Fraction(-1, 7)
    with pytest.raises(ValueError):
        series.fixed_prime_slice(11, 10, sieve_small)


def test_fixed_prime_slices_partition_total(sieve_small, ctx_c4):
    # summing slices over all primes <= x reproduces the unconditional sum
    x = 200
    total = sum(
        (series.fixed_prime_slice(p, x, sieve_small) for p in sieve_small.primes_up_to(x)),
        Fraction(0),
    )
    assert total == enum_bucket_sum(sieve_small, ctx_c4, x)


def test_fixed_prime_slice_drift(sieve_big):
    # each fixed-prime slice drifts toward 0, but very slowly: the p = 2
    # slice still sits near 0.086 at x = 10^6
    v6 = series.fixed_prime_slice(2, 1_000_000, sieve_big)
    v3 = series.fixed_prime_slice(2, 1_000, sieve_big, mode="compensated")
    assert abs(v6) < 0.1
    assert abs(v6) < abs(v3)


def test_sum_mu_in_class(sieve_small, ctx_c4):
    # mu over n <= 10 with p1 = 3 mod 4: n in {3, 7} -> -2
    assert series.sum_mu_in_class(ctx_c4, "3 mod 4", 10, sieve_small) == -2


def test_count_P2_in_class_x35(sieve_small, ctx_cubic):
    for lab in ctx_cubic.labels():
        assert series.count_P2_in_class(ctx_cubic, lab, 35, sieve_small) == enum_n2(
            sieve_small, ctx_cubic, 35, lab
        )


def test_count_P2_trivial_small_x(sieve_small, ctx_cubic, ctx_c4):
    for ctx in (ctx_cubic, ctx_c4):
        for lab in ctx.labels():
            assert series.count_P2_in_class(ctx, lab, 3, sieve_small) == 0


@given(st.integers(4, 400))
@settings(max_examples=60, deadline=None)
def test_count_P2_matches_enumeration(sieve_small, ctx_cubic, x):
    for lab in ctx_cubic.labels():
        assert series.count_P2_in_class(ctx_cubic, lab, x, sieve_small) == enum_n2(
            sieve_small, ctx_cubic, x, lab
        )


def test_P2_count_balance(sieve_small, ctx_cubic, ctx_c4):
    # classes + ramified bucket + {omega <= 1 or P1 repeats} = x - 1
    for ctx in (ctx_cubic, ctx_c4):
        for x in (35, 1000, 10_000):
            total = sum(
                series.count_P2_in_class(ctx, lab, x, sieve_small)
                for lab in ctx.labels()
            )
            total += series.count_P2_ramified(ctx, x, sieve_small)
            total += series.count_P2_small_or_repeated(x, sieve_small)
            assert total == x - 1


def test_count_repeated_P1(sieve_small):
    # n <= 10 with repeated largest prime factor: 4, 8, 9
    assert series.count_repeated_P1(10, sieve_small) == 3
    brute = sum(
        1 for n in range(2, 1001) if sieve_small.factorize(n)[-1][1] >= 2
    )
    assert series.count_repeated_P1(1000, sieve_small) == brute


def test_psi_smooth_oracles(sieve_small):
    # 2-smooth n <= 10: 1, 2, 4, 8
    assert series.psi_smooth(10, 2, sieve_small) == 4
    assert series.psi_smooth(30, 5, sieve_small) == 18
    assert series.psi_smooth(50, 50, sieve_small) == 50
    with pytest.raises(ValueError):
        series.psi_smooth(10, 11, sieve_small)
    with pytest.raises(ValueError):
        series.psi_smooth(10, 0, sieve_small)


@given(st.integers(2, 2000), st.integers(1, 2000))
@settings(max_examples=80, deadline=None)
def test_psi_smooth_matches_enumeration(sieve_small, x, y):
    if y > x:
        x, y = y, max(x, 1)
    brute = 1 + sum(
        1 for n in range(2, x + 1) if sieve_small.factorize(n)[-1][0] <= y
    )
    assert series.psi_smooth(x, y, sieve_small) == brute


def test_psi_monotone_in_y(sieve_small):
    vals = [series.psi_smooth(5000, y, sieve_small) for y in (1, 2, 10, 100, 5000)]
    assert vals == sorted(vals)
    assert vals[0] == 1 and vals[-1] == 5000


def test_count_P2_below(sieve_small):
    # n <= 30 with strict P2 <= 2: all n with omega < 2, plus P2 = 2 cases
    brute = sum(
        1
        for n in range(1, 31)
        if (sieve_small.prime_extremes(n)[2] if n > 1 else 1) <= 2
    )
    assert series.count_P2_below(30, 2, sieve_small) == brute


# -- Dickman rho ------------------------------------------------------------


def test_rho_is_one_on_unit_interval():
    for a in (0.0, 0.25, 0.5, 0.99, 1.0):
        assert series.dickman_rho(a) == 1.0


def test_rho_at_two():
    assert abs(series.dickman_rho(2.0) - (1 - math.log(2))) < 1e-8


def test_rho_closed_form_on_1_2():
    # rho(a) = 1 - ln(a) there
    for a in (1.1, 1.5, 1.9):
        assert abs(series.dickman_rho(a) - (1 - math.log(a))) < 1e-8


def test_rho_at_three_vs_quadrature():
    # rho(3) = 1 - ln 2 - int_2^3 (1 - ln(u-1))/u du, with the closed form
    # for rho on [1,2] feeding an independent adaptive quadrature
    tail, err = scipy.integrate.quad(lambda u: (1 - math.log(u - 1)) / u, 2, 3)
    expected = 1 - math.log(2) - tail
    assert err < 1e-10
    assert abs(series.dickman_rho(3.0) - expected) < 1e-6


def test_rho_monotone_positive():
    alphas, vals = series.dickman_grid()
    assert np.all(vals > 0)
    lo = np.searchsorted(alphas, 1.0)
    assert np.all(np.diff(vals[lo:]) < 0)


def test_rho_interpolation_continuity():
    for a in (1.00005, 2.71828, 19.99995):
        lo = series.dickman_rho(a - 1e-6)
        hi = series.dickman_rho(a + 1e-6)
        assert abs(lo - hi) <= 2e-4 * max(lo, 1e-300)


def test_rho_domain_errors():
    with pytest.raises(ValueError):
        series.dickman_rho(-0.1)
    with pytest.raises(ValueError):
        series.dickman_rho(20.5)
