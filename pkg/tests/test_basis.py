from __future__ import annotations

import pytest
from mpmath import mp

from boltzspect.basis import (BasisFunctionTable, gaussian_inner, integral_phi, laguerre_half, mu,
                              phi_at_zero, phi_eval, radial_cutoff, radial_rule, sqrt_mu)


def _phi_explicit(n, v):
    # explicit alternating Laguerre sum, independent of the recurrence
    a = mp.mpf(1) / 2
    x = mp.mpf(v) ** 2 / 2
    lag = mp.fsum((-1) ** r * mp.binomial(n + a, n - r) * x ** r / mp.factorial(r) for r in range(n + 1))
    c = mp.sqrt(mp.factorial(n) / (mp.sqrt(2) * mp.gamma(n + mp.mpf(3) / 2)))
    return c * mp.exp(-x / 2) * lag / mp.sqrt(4 * mp.pi)


def test_phi_zero_at_origin():
    # (2 pi)^(-3/4)
    assert abs(phi_eval(0, 0) - (2 * mp.pi) ** (-0.75)) < 1e-15
    assert mp.nstr(phi_eval(0, 0), 10) == "0.2519794355"


def test_phi_one_vanishes_on_sphere():
    assert abs(phi_eval(1, mp.sqrt(3))) < 1e-15


def test_phi_one_closed_form():
    for v in (0, 0.7, 2.0, 3.5):
        expected = (3 - mp.mpf(v) ** 2) / mp.sqrt(6) * sqrt_mu(v)
        assert abs(phi_eval(1, v) - expected) < 1e-15


def test_phi_at_zero_values():
    base = (2 * mp.pi) ** (-0.75)
    assert abs(phi_at_zero(1) - base * mp.sqrt(mp.mpf(6) / 4)) < 1e-15
    assert abs(phi_at_zero(2) - base * mp.sqrt(mp.mpf(120) / (16 * 4))) < 1e-15
    for n in range(21):
        assert abs(phi_at_zero(n) - phi_eval(n, 0)) < 1e-13 * phi_at_zero(n)


def test_integral_phi_against_quadrature():
    with mp.workdps(30):
        rs, ws = radial_rule(30)
        table = BasisFunctionTable(5)
        for n in range(6):
            quad = mp.fsum(w * table.phi(n, r) for r, w in zip(rs, ws))
            assert abs(quad - integral_phi(n)) < mp.mpf("1e-20")
    assert abs(integral_phi(0) - 8 * mp.pi ** 1.5 * (2 * mp.pi) ** -0.75) < 1e-12


def test_integral_phi_parity():
    for k in range(10):
        assert integral_phi(2 * k + 1) < 0 < integral_phi(2 * k)


def test_gaussian_inner_structural_cases():
    assert gaussian_inner(1, 0) == 1
    for n in range(1, 20):
        assert gaussian_inner(1, n) == 0
    with pytest.raises(ValueError):
        gaussian_inner(0, 1)


def test_gaussian_inner_against_quadrature():
    a = mp.mpf("0.7071067812")
    with mp.workdps(30):
        rs, ws = radial_rule(30)
        quad = mp.fsum(w * sqrt_mu(a * r) * phi_eval(2, r) for r, w in zip(rs, ws))
    assert abs(gaussian_inner(a, 2) - quad) < 1e-10


def test_orthonormality():
    with mp.workdps(20):
        rs, ws = radial_rule(20)
        table = BasisFunctionTable(20)
        vals = [table.phi_all(r) for r in rs]
        for p in range(21):
            for q in range(p, 21):
                s = mp.fsum(w * v[p] * v[q] for w, v in zip(ws, vals))
                assert abs(s - (1 if p == q else 0)) < 1e-10, (p, q)


@pytest.mark.parametrize("v", [0.5, 1, 2, 4])
def test_recurrence_matches_explicit_sum(v):
    with mp.workdps(50):
        ref = _phi_explicit(20, v)
        got = BasisFunctionTable(20).phi(20, v)
        assert abs(got - ref) <= mp.mpf("1e-12") * abs(ref)


def test_normalizations_finite_for_large_n():
    table = BasisFunctionTable(300)
    c = table.normalization(300)
    assert mp.isfinite(c) and c > 0
    with pytest.raises(ValueError):
        table.phi(301, 1)


def test_laguerre_low_orders():
    x = mp.mpf("0.8")
    vals = laguerre_half(2, x)
    assert vals[0] == 1
    assert abs(vals[1] - (mp.mpf(3) / 2 - x)) < 1e-15
    assert abs(vals[2] - (x ** 2 / 2 - mp.mpf(5) / 2 * x + mp.mpf(15) / 8)) < 1e-15


def test_mu_and_sqrt_mu():
    assert abs(sqrt_mu(1.3) ** 2 - mu(1.3)) < 1e-16
    with mp.workdps(30):
        rs, ws = radial_rule(30)
        assert abs(mp.fsum(w * mu(r) for r, w in zip(rs, ws)) - 1) < 1e-25
        assert abs(mp.fsum(w * r * r * mu(r) for r, w in zip(rs, ws)) - 3) < 1e-25


def test_radial_cutoff_covers_precision():
    for d in (10, 30, 60):
        R = radial_cutoff(d)
        assert mp.exp(-R ** 2 / 4) * R ** 4 < mp.mpf(10) ** -d
