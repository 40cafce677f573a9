"""Linear eigenvalues ``lambda_n`` and nonlinear eigenvalues ``mu_pq``.

For the ``sin^-2`` kernel every integral is a trigonometric polynomial over
``[0, pi/4]`` once the kernel singularity is divided out, so the values are
exact :class:`PiRational` numbers.  Other kernels go through tanh-sinh
quadrature.  Both conventions integrate over ``|theta| <= pi/4`` realized as
twice the half interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Tuple

import mpmath
from mpmath import mp

from .exact_arith import ZERO, PiRational, SqrtRationalFactor, to_float, trig_power_integral
from .kernel import KernelSpec, singular_quadrature


class InvariantViolation(AssertionError):
    """An eigenvalue table broke a structural property; indicates a bug."""


def _require_exact(kernel: KernelSpec):
    if not kernel.is_exact:
        raise ValueError("exact eigenvalues exist only for the sin^-2 kernel")


def lambda_exact(n: int) -> PiRational:
    """``lambda_n`` for ``beta = sin^-2``.

    Uses ``(1 - sin^2n - cos^2n) / sin^2 = sum_{k<n} cos^2k - sin^(2n-2)``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return ZERO
    total = ZERO
    for k in range(n):
        total = total + trig_power_integral(0, k)
    return (total - trig_power_integral(n - 1, 0)) * 2


def mu_prefactor(p: int, q: int) -> SqrtRationalFactor:
    return SqrtRationalFactor(
        Fraction(2 * p + 2 * q + 1, (2 * p + 1) * (2 * q + 1)) * comb(2 * p + 2 * q, 2 * p))


def mu_exact(p: int, q: int) -> Tuple[SqrtRationalFactor, PiRational]:
    """Exact ``mu_pq`` for ``p >= 1``, as (sqrt prefactor, integral)."""
    if p < 1 or q < 0:
        raise ValueError("mu_exact needs p >= 1, q >= 0")
    return mu_prefactor(p, q), trig_power_integral(p - 1, q) * 2


def mu_zero_exact(q: int) -> PiRational:
    """Exact ``mu_0q = -int_{|theta|<=pi/4} sin^-2 (1 - cos^2q)``."""
    if q < 1:
        raise ValueError("mu_zero_exact needs q >= 1")
    total = ZERO
    for k in range(q):
        total = total + trig_power_integral(0, k)
    return -total * 2


def _one_minus_cos_pow(theta, n):
    # 1 - cos^(2n) without cancellation near theta = 0
    return -mp.expm1(n * mp.log1p(-mp.sin(theta) ** 2))


def lambda_numeric(n: int, kernel: KernelSpec, tol: float = 1e-12):
    """``lambda_n`` by quadrature of the kernel-weighted integrand."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n <= 1:
        return mp.zero

    def integrand(theta):
        return kernel.beta(theta) * (_one_minus_cos_pow(theta, n) - mp.sin(theta) ** (2 * n))

    return 2 * singular_quadrature(integrand, 0, tol)


def mu_numeric(p: int, q: int, kernel: KernelSpec, tol: float = 1e-12):
    """``mu_pq`` (``p >= 1``) or ``mu_0q`` (``p == 0``) by quadrature."""
    if p == 0:
        def integrand(theta):
            return kernel.beta(theta) * _one_minus_cos_pow(theta, q)
        return -2 * singular_quadrature(integrand, 0, tol)

    def integrand(theta):
        return kernel.beta(theta) * mp.sin(theta) ** (2 * p) * mp.cos(theta) ** (2 * q)

    return mu_prefactor(p, q).to_mpf() * 2 * singular_quadrature(integrand, 2 * p - 2, tol)


@dataclass
class EigenTable:
    """``lambda_n`` for ``n <= n_max`` and ``mu_pq`` for ``p + q <= n_max``."""

    n_max: int
    kernel: KernelSpec
    digits: int
    lambda_num: List[mpmath.mpf]
    mu_num: Dict[Tuple[int, int], mpmath.mpf]
    lambda_exact: Optional[List[PiRational]] = None
    mu_exact: Optional[Dict[Tuple[int, int], Tuple[SqrtRationalFactor, PiRational]]] = None
    mu0_exact: Optional[Dict[int, PiRational]] = None
    numeric_source: str = "exact"
    _mu_lowered: Dict = field(default_factory=dict, repr=False)

    def lam(self, n: int):
        return self.lambda_num[n]

    def mu(self, p: int, q: int):
        return self.mu_num[(p, q)]

    def mu_value(self, p: int, q: int, digits: int):
        """``mu_pq`` lowered from the exact pair at ``digits`` precision."""
        key = (p, q, digits)
        if key not in self._mu_lowered:
            if self.mu_exact is None:
                with mp.workdps(digits):
                    self._mu_lowered[key] = +self.mu_num[(p, q)]
            else:
                pref, integral = self.mu_exact[(p, q)]
                with mp.workdps(digits + 10):
                    v = pref.to_mpf() * integral.to_mpf()
                with mp.workdps(digits):
                    self._mu_lowered[key] = +v
        return self._mu_lowered[key]

    def check_invariants(self):
        lam = self.lambda_num
        if lam[0] != 0 or (self.n_max >= 1 and lam[1] != 0):
            raise InvariantViolation("lambda_0 and lambda_1 must vanish")
        for n in range(2, self.n_max + 1):
            if not lam[n] > lam[n - 1]:
                raise InvariantViolation(f"lambda not strictly increasing at n={n}")
        # the sqrt(n) envelope is specific to s = 1/2; other kernels grow like n^s
        envelope = range(4, self.n_max + 1) if self.kernel.is_exact else ()
        for n in envelope:
            ratio = lam[n] / mp.sqrt(n)
            if not 1.5 <= ratio <= 4.5:
                raise InvariantViolation(f"lambda_{n}/sqrt({n}) = {mp.nstr(ratio, 5)} outside [1.5, 4.5]")
        for p in range(2, self.n_max // 2 + 1):
            for q in range(p, self.n_max - p + 1):
                if self.lambda_exact is not None:
                    ok = self.lambda_exact[p + q] < self.lambda_exact[p] + self.lambda_exact[q]
                else:
                    ok = lam[p + q] < lam[p] + lam[q]
                if not ok:
                    raise InvariantViolation(f"subadditivity fails for p={p}, q={q}")
        for (p, q), val in self.mu_num.items():
            if p >= 1 and not val > 0:
                raise InvariantViolation(f"mu_{p},{q} must be positive")
            if p == 0 and not val < 0:
                raise InvariantViolation(f"mu_0,{q} must be negative")


def build_table(n_max: int, kernel: Optional[KernelSpec] = None, digits: int = 30,
                numeric: Optional[str] = None, tol: float = 1e-12) -> EigenTable:
    """Populate all eigenvalues up to ``n_max`` and verify the table.

    ``numeric`` selects where the floating values come from: ``"exact"``
    lowers the closed forms (only for the sin^-2 kernel), ``"quadrature"``
    integrates the kernel directly.  The default is ``"exact"`` whenever it is
    available.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    kernel = kernel or KernelSpec.exact()
    if numeric is None:
        numeric = "exact" if kernel.is_exact else "quadrature"
    if numeric not in ("exact", "quadrature"):
        raise ValueError(f"unknown numeric source {numeric!r}")
    if numeric == "exact":
        _require_exact(kernel)

    lam_ex = mu_ex = mu0_ex = None
    if kernel.is_exact:
        lam_ex = [lambda_exact(n) for n in range(n_max + 1)]
        mu_ex = {(p, q): mu_exact(p, q) for p in range(1, n_max + 1) for q in range(0, n_max - p + 1)}
        mu0_ex = {q: mu_zero_exact(q) for q in range(1, n_max + 1)}

    if numeric == "exact":
        lam_num = [to_float(x, digits) for x in lam_ex]
        mu_num = {}
        with mp.workdps(digits + 10):
            lowered = {k: pref.to_mpf() * val.to_mpf() for k, (pref, val) in mu_ex.items()}
            lowered0 = {(0, q): v.to_mpf() for q, v in mu0_ex.items()}
        with mp.workdps(digits):
            for k, v in {**lowered, **lowered0}.items():
                mu_num[k] = +v
    else:
        with mp.workdps(digits):
            lam_num = [lambda_numeric(n, kernel, tol) for n in range(n_max + 1)]
            mu_num = {(p, q): mu_numeric(p, q, kernel, tol)
                      for p in range(1, n_max + 1) for q in range(0, n_max - p + 1)}
            mu_num.update({(0, q): mu_numeric(0, q, kernel, tol) for q in range(1, n_max + 1)})

    table = EigenTable(n_max=n_max, kernel=kernel, digits=digits, lambda_num=lam_num,
                       mu_num=mu_num, lambda_exact=lam_ex, mu_exact=mu_ex, mu0_exact=mu0_ex,
                       numeric_source=numeric)
    table.check_invariants()
    return table
