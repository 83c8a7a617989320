import itertools

import pytest

from kloost3 import (
    ConsistencyError,
    UsageError,
    kloosterman_all_fast,
    predict_mod2,
    predict_mod9,
    predict_mod18,
    predict_mod27,
    predict_mod54,
    trace_tables,
    verify_nine_divides,
    verify_sweep,
)
from kloost3.congruence import (
    Counterexample,
    VerifyReport,
    crt,
    mod27_polynomial,
    mod27_table,
    mod27_tau_z_form,
)
from kloost3.kloosterman import KloostermanTable
from kloost3.traces import TraceProfile


@pytest.mark.parametrize("tr, expected", [(0, 0), (1, 3), (2, 6)])
def test_predict_mod9(tr, expected):
    assert predict_mod9(tr) == expected


def _consistent_profiles():
    """All (tr, tau_x, tau_y) with tau_z forced by Tr*tau_X = Tr + 2 tau_Z when Tr != 0."""
    for tr, x, y in itertools.product(range(3), repeat=3):
        zs = [z for z in range(3) if (tr * x - tr - 2 * z) % 3 == 0]
        yield TraceProfile(tr, x, y, zs[0])


def test_mod27_examples():
    assert predict_mod27(TraceProfile(0, 0, 0, 0)) == 0
    for x in range(3):
        assert mod27_table(TraceProfile(1, x, 2, 0)) == 3
    assert mod27_table(TraceProfile(2, 0, 2, 0)) == 6


def test_mod27_refines_mod9_and_forms_agree():
    seen = set()
    for p in _consistent_profiles():
        r = predict_mod27(p)
        assert r % 9 == predict_mod9(p.tr)
        assert r % 3 == 0
        seen.add((p.tr, p.tau_x, p.tau_y))
    assert len(seen) == 27


def test_mod27_rows_cover_all_residues():
    residues = {mod27_polynomial(p) for p in _consistent_profiles()}
    assert residues == set(range(0, 27, 3))


def test_mod27_disagreement_is_internal_error():
    # tau_z inconsistent with the identity: tau_Z form must diverge from the other two
    p = TraceProfile(1, 0, 0, 0)  # identity needs 0 = 1 + 2 tau_Z, so tau_Z = 1
    assert mod27_polynomial(p) == mod27_table(p)
    assert mod27_tau_z_form(p) != mod27_polynomial(p)
    with pytest.raises(ConsistencyError):
        predict_mod27(p)


def test_crt():
    assert crt(3, 9, 1, 2) == 3
    assert crt(0, 27, 1, 2) == 27
    for r9, r2 in itertools.product(range(9), range(2)):
        r = crt(r9, 9, r2, 2)
        assert r % 9 == r9 and r % 2 == r2 and 0 <= r < 18


def test_gf9_a1(fields):
    ctx = fields(2)
    assert predict_mod2(ctx, 0) == 0
    assert predict_mod2(ctx, 1) == 0
    assert predict_mod18(ctx, 1) == 6
    assert kloosterman_all_fast(ctx)[1] == 6
    assert predict_mod2(ctx, ctx.generator) == 1  # non-square


def test_mod18_rejects_zero(fields):
    with pytest.raises(ValueError):
        predict_mod18(fields(3), 0)


def test_mod54_requires_n3(fields):
    ctx = fields(2)
    with pytest.raises(UsageError):
        predict_mod54(ctx, 1, TraceProfile(2, 0, 0, 2))


@pytest.mark.parametrize("n, modulus", [(4, 9), (3, 27), (3, 54), (5, 18), (6, 2)])
def test_sweeps_clean(fields, n, modulus):
    ctx = fields(n)
    rep = verify_sweep(ctx, modulus, kloosterman_all_fast(ctx))
    assert rep.mismatches == 0 and rep.first_counterexample is None
    assert rep.total == (ctx.q - 1 if modulus == 18 else ctx.q)


def test_sweep_n2_mod27_is_usage_error(fields):
    ctx = fields(2)
    with pytest.raises(UsageError, match="requires n ≥ 3"):
        verify_sweep(ctx, 27, kloosterman_all_fast(ctx))


def test_sweep_reports_counterexample(fields):
    ctx = fields(3)
    vals = kloosterman_all_fast(ctx).values.copy()
    vals[5] += 9
    vals[11] += 9
    rep = verify_sweep(ctx, 27, KloostermanTable(3, vals, "fast"))
    assert rep.mismatches == 2
    assert rep.first_counterexample.index == 5
    assert rep.as_dict()["first_counterexample"]["coeffs"] == ctx.format(5)
    # mod 9 cannot see a shift by 9
    assert verify_sweep(ctx, 9, KloostermanTable(3, vals, "fast")).mismatches == 0


def test_sweep_rejects_foreign_table(fields):
    with pytest.raises(UsageError):
        verify_sweep(fields(3), 9, kloosterman_all_fast(fields(4)))
    other = fields(4, (1, 0, 1, 1))
    with pytest.raises(UsageError):
        verify_sweep(fields(4), 9, kloosterman_all_fast(other))


def test_nine_divides_rule_detects_violation(fields):
    ctx = fields(3)
    vals = kloosterman_all_fast(ctx).values.copy()
    a = next(a for a in range(ctx.q) if ctx.trace(a) == 1)
    vals[a] = 9
    assert verify_nine_divides(ctx, KloostermanTable(3, vals, "fast")).mismatches == 1


@pytest.mark.parametrize("workers", [1, 3, 4])
def test_parallel_sweep_matches_serial(fields, workers):
    ctx = fields(5)
    vals = kloosterman_all_fast(ctx).values.copy()
    vals[100] += 27
    vals[7] += 27
    table = KloostermanTable(5, vals, "fast")
    rep = verify_sweep(ctx, 54, table, trace_tables(ctx), workers=workers)
    assert (rep.total, rep.mismatches, rep.first_counterexample.index) == (243, 2, 7)


def test_report_merge():
    ce = Counterexample(9, (0, 0, 1), 3, 12)
    a = VerifyReport(3, 27, 10, 0, None, 0.5, "r")
    b = VerifyReport(3, 27, 17, 1, ce, 0.25, "r")
    m = a.merge(b)
    assert (m.total, m.mismatches, m.first_counterexample, m.elapsed) == (27, 1, ce, 0.75)
    assert b.merge(a).first_counterexample == ce
    with pytest.raises(ValueError):
        a.merge(VerifyReport(3, 9, 1, 0, None))


def test_report_json_schema():
    d = VerifyReport(3, 27, 27, 0, None, 0.0123, "r").as_dict()
    assert set(d) >= {"n", "modulus", "total", "mismatches", "first_counterexample", "elapsed_ms"}
    assert d["first_counterexample"] is None
    assert d["elapsed_ms"] == 12.3


@pytest.mark.parametrize("n", [3, 4])
def test_classifiers_invariant_under_modulus_choice(fields, n):
    default = fields(n)
    alt_low = {3: (2, 2, 0), 4: (1, 0, 1, 1)}[n]
    alt = fields(n, alt_low)
    for ctx in (default, alt):
        table = kloosterman_all_fast(ctx)
        for m in (2, 9, 18, 27, 54):
            assert verify_sweep(ctx, m, table).mismatches == 0
