import random

import pytest

from kloost3 import UsageError, kloosterman_all_fast, wt3
from kloost3.padic import (
    RamifiedElem,
    UnramifiedRing,
    cong3_check,
    fourier_congruence_check,
    gamma3,
    gamma3_fractional,
    gauss_sum,
    gauss_value,
    gross_koblitz_check,
    gross_koblitz_product,
    hat_form,
    stickelberger_check,
    teichmuller,
    valuation_check,
    wt1lem_check,
)


def gamma3_by_recurrence(m, k):
    """Gamma_3(0) = 1, Gamma_3(x+1) = -x Gamma_3(x) if 3 does not divide x, else -Gamma_3(x)."""
    mod = 3**k
    g = 1
    for x in range(m):
        g = (-x * g if x % 3 else -g) % mod
    return g


@pytest.fixture(scope="module")
def rings(fields):
    cache = {}

    def get(n, k):
        if (n, k) not in cache:
            cache[(n, k)] = UnramifiedRing(fields(n), k)
        return cache[(n, k)]

    return get


# -- Gamma_3 ---------------------------------------------------------------------


def test_gamma3_golden():
    assert gamma3(1, 3) == 26
    assert gamma3(24, 3) == 13
    assert gamma3(234, 3) == 1
    assert gamma3(1, 5) == 3**5 - 1


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_gamma3_matches_recurrence(k):
    for m in range(1, 200):
        assert gamma3(m, k) == gamma3_by_recurrence(m, k)


def test_generalised_wilson():
    for k in (2, 3):
        mod = 3**k
        for x in range(1, 60):
            assert gamma3(x, k) == gamma3(x + mod, k)


def test_gamma3_fractional():
    assert gamma3_fractional(3, 26, 3) == 13
    assert gamma3_fractional(9, 26, 3) == 1
    assert gamma3_fractional(1, 26, 3) == gamma3(26, 3)
    with pytest.raises(ValueError):
        gamma3_fractional(1, 27, 3)
    with pytest.raises(ValueError):
        gamma3_fractional(26, 26, 3)


# -- ring basics --------------------------------------------------------------------


@pytest.mark.parametrize("k", range(1, 7))
def test_zeta_and_pi(rings, k):
    r = rings(2, k)
    z = r.zeta
    assert (z * z + z + 1).is_zero()
    assert (r.pi - (z - 1)).in_pi_ideal(2)
    assert r.pi * r.pi == RamifiedElem.from_int(r, -3)
    assert r.pi == -2 * z - 1


def test_pi_ideal_membership(rings):
    r = rings(2, 3)
    for m in range(0, 7):
        p = r.pi**m
        assert p.in_pi_ideal(m)
        if m < 6:
            assert p.val_pi() == m
            assert not p.in_pi_ideal(m + 1)
    assert (r.pi**6).is_zero()  # pi^6 = -27
    with pytest.raises(UsageError):
        r.pi.in_pi_ideal(7)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_teichmuller(rings, n):
    r = rings(n, 3)
    ctx = r.ctx
    assert teichmuller(r, 1) == r.one
    assert teichmuller(r, 2) == r.const(26)
    assert teichmuller(r, 0) == r.zero
    for a in range(1, ctx.q):
        w = teichmuller(r, a)
        assert w == r.omega(a)
        assert w.reduce() == a
        assert w ** (ctx.q - 1) == r.one
        assert w**3 == r.omega(ctx.pow(a, 3))
    for a in range(1, ctx.q, 2):
        for b in range(1, ctx.q, 3):
            assert r.omega(ctx.mul(a, b)) == r.omega(a) * r.omega(b)


# -- Gauss sums --------------------------------------------------------------------


def test_gauss_example_values(rings):
    g1 = gauss_value(rings(2, 2), 1)
    assert (g1 * g1 - 6).in_3ideal(2)
    r = rings(3, 3)
    for j in range(1, 26):
        if wt3(j) == 2:
            g = gauss_value(r, j)
            assert (g * g - 9).in_3ideal(3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gauss_frobenius_invariance(rings, n):
    r = rings(n, 4)
    m = r.ctx.q - 1
    for j in range(1, m):
        assert gauss_value(r, j) == gauss_value(r, (3 * j) % m)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gauss_records_and_valuations(rings, n):
    r = rings(n, 6)
    for j in range(1, r.ctx.q - 1):
        rec = gauss_sum(r, j)
        assert rec.weight == wt3(j)
        assert rec.value.val_pi() == rec.weight
    assert valuation_check(r).ok


def test_gauss_j_range(rings):
    with pytest.raises(UsageError):
        gauss_sum(rings(2, 3), 0)
    with pytest.raises(UsageError):
        gauss_sum(rings(2, 3), 8)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_stickelberger_and_gross_koblitz(rings, n):
    r6, r3 = rings(n, 6), rings(n, 3)
    for j in range(1, r6.ctx.q - 1):
        assert stickelberger_check(r6, j)
        assert gross_koblitz_check(r3, j)


def test_stickelberger_weight2_digits_11(rings):
    r = rings(3, 3)
    j = 1 + 3  # digits (1, 1, 0)
    g = gauss_value(r, j)
    assert (g + 3).in_3ideal(2)  # g(j) = -3 mod 9


def test_stickelberger_precision_error(rings):
    r = rings(3, 2)
    with pytest.raises(UsageError, match="k >= 4"):
        stickelberger_check(r, 25)  # wt 5


def test_gross_koblitz_detects_wrong_sign(rings):
    r = rings(3, 3)
    assert not (gauss_value(r, 1) + gross_koblitz_product(r, 1)).in_3ideal(3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_wt1lem(rings, n):
    rep = wt1lem_check(rings(n, 3))
    assert rep.ok and rep.total == 3**n - 2


def test_wt1lem_needs_k3(rings):
    with pytest.raises(UsageError):
        wt1lem_check(rings(2, 2))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_cong3(rings, n):
    assert cong3_check(rings(n, 1))
    assert cong3_check(rings(n, 3))


# -- Fourier congruence -------------------------------------------------------------


def test_first_kl_n3_all(rings):
    r = rings(3, 3)
    table = kloosterman_all_fast(r.ctx)
    for a in range(27):
        assert fourier_congruence_check(r, a, 3, kvalue=table[a])
    assert fourier_congruence_check(r, 0)


def test_first_kl_n4_sampled(rings):
    r = rings(4, 3)
    for a in random.Random(4).sample(range(81), 50):
        assert fourier_congruence_check(r, a)


def test_first_kl_full_precision_n4(rings):
    r = rings(4, 4)
    table = kloosterman_all_fast(r.ctx)
    assert all(fourier_congruence_check(r, a, 4, kvalue=table[a]) for a in range(0, 81, 4))


def test_first_kl_rejects_wrong_value(rings):
    r = rings(3, 3)
    K = kloosterman_all_fast(r.ctx)[5]
    assert not fourier_congruence_check(r, 5, kvalue=K + 9)
    assert not (hat_form(r, 5) - (K + 3)).in_3ideal(3)


def test_first_kl_k_too_large(rings):
    with pytest.raises(UsageError):
        fourier_congruence_check(rings(2, 3), 1, 3)
