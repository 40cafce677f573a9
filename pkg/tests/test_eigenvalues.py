from __future__ import annotations

from fractions import Fraction as F

import pytest
from mpmath import mp

from boltzspect.eigenvalues import (InvariantViolation, build_table, lambda_exact, lambda_numeric,
                                    mu_exact, mu_numeric, mu_zero_exact)
from boltzspect.exact_arith import PiRational, to_float
from boltzspect.kernel import KernelSpec

TABLE1 = {
    2: (F(1), F(1, 2), "2.570796327"),
    3: (F(3, 2), F(3, 4), "3.856194490"),
    4: (F(23, 12), F(15, 16), "4.861909780"),
    5: (F(55, 24), F(35, 32), "5.727783632"),
    10: (F(61717, 16128), F(109395, 65536), "9.070756042"),
    15: (F(41349267, 8200192), F(35102025, 16777216), "11.61545300"),
    20: (F(60225247403, 9906683904), F(83945001525, 34359738368), "13.75454524"),
}

# printed values; tolerance is one unit in the last printed digit
TABLE2 = {
    (1, 1): "2.35", (1, 2): "2.88", (1, 3): "3.29", (1, 4): "3.62", (1, 19): "6.68",
    (2, 1): "0.519", (2, 2): "0.702", (2, 3): "0.84", (2, 18): "1.55",
    (3, 1): "0.196", (3, 2): "0.30", (3, 17): "0.75",
    (4, 1): "0.084", (4, 16): "0.46",
    (19, 1): "0.00001",
}


def _unit(printed: str) -> float:
    return 10.0 ** -len(printed.split(".")[1])


@pytest.mark.parametrize("n", sorted(TABLE1))
def test_lambda_exact_table(n):
    rat, pi, numeric = TABLE1[n]
    assert lambda_exact(n) == PiRational(rat, pi)
    val = to_float(lambda_exact(n), 10)
    ref = mp.mpf(numeric)
    assert abs(val - ref) / ref < 5e-10


def test_lambda_low_orders():
    assert lambda_exact(0) == PiRational()
    assert lambda_exact(1) == PiRational()
    assert lambda_numeric(1, KernelSpec.power_law(0.3)) == 0


def test_lambda_numeric_examples():
    k = KernelSpec.exact()
    assert abs(lambda_numeric(3, k) - mp.mpf("3.856194490")) < 1e-9
    assert abs(lambda_numeric(10, k) - mp.mpf("9.070756042")) < 1e-9


def test_lambda_exact_numeric_agreement():
    k = KernelSpec.exact()
    with mp.workdps(30):
        for n in range(2, 21):
            ex = to_float(lambda_exact(n), 30)
            assert abs(ex - lambda_numeric(n, k, 1e-12)) <= 1e-11 * ex


@pytest.mark.parametrize("pq", sorted(TABLE2))
def test_mu_table(table20, pq):
    printed = TABLE2[pq]
    assert abs(float(table20.mu(*pq)) - float(printed)) <= _unit(printed)


def test_mu_asymmetry(table20):
    assert table20.mu(1, 2) > 5 * table20.mu(2, 1)
    assert abs(float(table20.mu(1, 2)) - 2.88) < 0.01
    assert abs(float(table20.mu(2, 1)) - 0.519) < 0.001


def test_mu_exact_matches_quadrature():
    k = KernelSpec.exact()
    for p, q in [(1, 1), (2, 2), (3, 5), (7, 2), (19, 1)]:
        pref, integral = mu_exact(p, q)
        with mp.workdps(30):
            ex = pref.to_mpf() * integral.to_mpf()
            assert abs(ex - mu_numeric(p, q, k, 1e-14)) <= 1e-12 * ex


def test_mu_zero_exact():
    assert mu_zero_exact(1) == PiRational(0, F(-1, 2))
    assert mu_zero_exact(2) == PiRational(F(-1, 2), F(-3, 4))
    k = KernelSpec.exact()
    for q in range(1, 21):
        assert mu_zero_exact(q).sign() < 0
    for q in (1, 2, 7):
        assert abs(mu_zero_exact(q).to_mpf() - mu_numeric(0, q, k)) < 1e-11


def test_subadditivity_exact_to_40():
    lam = [lambda_exact(n) for n in range(41)]
    for p in range(2, 39):
        for q in range(2, 41 - p):
            assert lam[p + q] < lam[p] + lam[q], (p, q)


def test_table_invariants_and_small_table():
    t = build_table(2)
    assert t.lam(0) == 0 and t.lam(1) == 0 and t.lam(2) > 0
    assert set(k for k in t.mu_num if k[0] >= 1) == {(1, 0), (1, 1), (2, 0)}
    with pytest.raises(ValueError):
        build_table(1)


def test_table_growth_envelope(table20):
    for n in range(4, 21):
        assert 1.5 <= table20.lam(n) / mp.sqrt(n) <= 4.5


def test_quadrature_table_agrees_with_exact():
    q = build_table(12, numeric="quadrature", digits=25, tol=1e-15)
    e = build_table(12, digits=25)
    for n in range(13):
        assert abs(q.lam(n) - e.lam(n)) < 1e-13
    for key, v in e.mu_num.items():
        assert abs(q.mu_num[key] - v) <= 1e-13 * max(1, abs(v)), key


def test_power_law_table():
    t = build_table(6, KernelSpec.power_law(0.25), digits=20, tol=1e-10)
    assert t.lambda_exact is None
    assert all(t.lam(n) < t.lam(n + 1) for n in range(1, 6))
    with pytest.raises(ValueError):
        build_table(6, KernelSpec.power_law(0.25), numeric="exact")


def test_corrupted_table_is_flagged(table20):
    import copy
    bad = copy.copy(table20)
    bad.lambda_num = list(table20.lambda_num)
    bad.lambda_num[5] = bad.lambda_num[4]
    with pytest.raises(InvariantViolation):
        bad.check_invariants()
