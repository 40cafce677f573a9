"""Closed-form spectral solution by the triangular integral recursion.

For ``n >= 4``

    h_n(t) = sum_{p+q=n, 2<=p,q<=n-2} int_0^t mu_pq exp(-(l_p + l_q - l_n) s)
                                       (G_p + h_p(s)) (G_q + h_q(s)) ds

and ``g_n(t) = exp(-l_n t) (G_n + h_n(t))``.  Every ``h_n`` is an
:class:`ExpSum`, so the recursion is pure exponential-sum algebra.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from mpmath import mp

from .eigenvalues import EigenTable, build_table
from .exact_arith import ZERO
from .expsum import ExpSum, integrate_shifted
from .initial_data import SpectralCoeffs
from .kernel import KernelSpec

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
DEFAULT_DIGITS = 30


class FormatError(ValueError):
    """Series file is unreadable, truncated, or of an unknown version."""


class PrecisionExhausted(ArithmeticError):
    """Coefficients left the representable range at the working precision."""


@dataclass
class SolutionSeries:
    """``h_0 .. h_N`` plus the data needed to evaluate ``g_n`` and ``f_N``."""

    N: int
    h: List[ExpSum]
    coeffs: SpectralCoeffs
    eigen: EigenTable
    digits: int
    prune_threshold: float = 0.0
    _g: dict = field(default_factory=dict, repr=False, compare=False)

    def G(self, n: int):
        return self.coeffs.values[n]

    def g(self, n: int) -> ExpSum:
        """Cached :func:`g_coefficient`."""
        if n not in self._g:
            self._g[n] = g_coefficient(self, n)
        return self._g[n]

    def structurally_equal(self, other: SolutionSeries) -> bool:
        return (self.N == other.N and self.digits == other.digits
                and self.h == other.h
                and list(self.coeffs.values[: self.N + 1]) == list(other.coeffs.values[: other.N + 1])
                and self.eigen.kernel == other.eigen.kernel)


def _check_coeffs(coeffs: SpectralCoeffs, N: int):
    if len(coeffs.values) < N + 1:
        raise ValueError(f"need coefficients G_0..G_{N}, got {len(coeffs.values)}")
    if coeffs.values[0] != 0 or coeffs.values[1] != 0:
        raise ValueError("initial data must satisfy G_0 = G_1 = 0")


def solve(coeffs: SpectralCoeffs, eigen: Optional[EigenTable] = None, N: int = 20,
          digits: int = DEFAULT_DIGITS, prune_threshold: float = 0.0) -> SolutionSeries:
    """Build ``h_n`` for ``n <= N`` at ``digits`` working precision."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if eigen is None:
        eigen = build_table(max(N, 2), digits=digits)
    if N > eigen.n_max:
        raise ValueError(f"N={N} exceeds eigen table size {eigen.n_max}")
    if eigen.lambda_exact is None:
        raise ValueError("closed-form solve needs exact rates (sin^-2 kernel)")
    _check_coeffs(coeffs, N)

    lam = eigen.lambda_exact
    h: List[ExpSum] = [ExpSum() for _ in range(min(N, 3) + 1)]
    with mp.workdps(digits):
        G = [mp.mpf(g) for g in coeffs.values[: N + 1]]
        base = [ExpSum.constant(G[n]) for n in range(N + 1)]
        for n in range(4, N + 1):
            total = ExpSum()
            full = [base[k] + h[k] for k in range(n - 1)]
            for p in range(2, n - 1):
                q = n - p
                if not full[p] or not full[q]:
                    continue
                shift = lam[p] + lam[q] - lam[n]
                product = (full[p] * full[q]).scale(eigen.mu_value(p, q, digits))
                total = total + integrate_shifted(product, shift)
            for rate, c in total.items():
                if not mp.isfinite(c):
                    raise PrecisionExhausted(f"non-finite coefficient in h_{n}")
            if prune_threshold:
                total = ExpSum(total.terms, prune_threshold)
            h.append(total)
            log.debug("h_%d: %d terms", n, len(total))
    return SolutionSeries(N=N, h=h, coeffs=coeffs, eigen=eigen, digits=digits,
                          prune_threshold=prune_threshold)


def g_coefficient(series: SolutionSeries, n: int) -> ExpSum:
    """``g_n(t) = exp(-lambda_n t) (G_n + h_n(t))`` as an exponential sum."""
    if not 0 <= n <= series.N:
        raise ValueError(f"n={n} outside 0..{series.N}")
    lam = series.eigen.lambda_exact
    with mp.workdps(series.digits):
        inner = ExpSum.constant(series.G(n)) + series.h[n]
        return inner.shift(lam[n]) if n >= 2 else inner


# -- persistence -------------------------------------------------------------

def to_json(series: SolutionSeries) -> dict:
    with mp.workdps(series.digits):
        return {
            "version": FORMAT_VERSION,
            "N": series.N,
            "digits": series.digits,
            "kernel": series.eigen.kernel.to_json(),
            "source": series.coeffs.source,
            "coeffs": [mp.nstr(mp.mpf(g), series.digits + 5, min_fixed=1, max_fixed=0)
                       for g in series.coeffs.values[: series.N + 1]],
            "h": [h.to_json(series.digits) for h in series.h],
        }


def from_json(obj: dict) -> SolutionSeries:
    if not isinstance(obj, dict) or "version" not in obj:
        raise FormatError("missing version field")
    if obj["version"] != FORMAT_VERSION:
        raise FormatError(f"unsupported series version {obj['version']!r} (expected {FORMAT_VERSION})")
    try:
        N = int(obj["N"])
        digits = int(obj["digits"])
        kernel = KernelSpec.from_json(obj["kernel"])
        with mp.workdps(digits):
            coeffs = SpectralCoeffs([mp.mpf(s) for s in obj["coeffs"]], obj.get("source", "UserSupplied"))
            h = [ExpSum.from_json(x) for x in obj["h"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"corrupt series file: {exc}") from exc
    if len(h) != N + 1 or len(coeffs.values) != N + 1:
        raise FormatError("series length does not match N")
    eigen = build_table(max(N, 2), kernel, digits=digits)
    return SolutionSeries(N=N, h=h, coeffs=coeffs, eigen=eigen, digits=digits)


def save(series: SolutionSeries, path) -> None:
    Path(path).write_text(json.dumps(to_json(series), indent=1))


def load(path) -> SolutionSeries:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    return from_json(obj)


def term_counts(series: SolutionSeries) -> List[int]:
    return [len(h) for h in series.h]


def constant_term(x: ExpSum):
    return x.coeff(ZERO)
