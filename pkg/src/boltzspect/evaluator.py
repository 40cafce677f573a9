"""Physical-space reconstruction and diagnostics of a :class:`SolutionSeries`.

``f_N(t, v) = mu(v) + sqrt(mu(v)) * sum_n g_n(t) phi_n(v)``.  Norms come from
the coefficients by Parseval; only the cross-check in the tests touches a
spatial quadrature.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Sequence

from mpmath import mp

from .basis import BasisFunctionTable, mu, radial_rule, sqrt_mu
from .eigenvalues import EigenTable, lambda_exact
from .exact_arith import to_float
from .initial_data import SpectralCoeffs
from .solver import SolutionSeries, solve


class DivisionByZero(ZeroDivisionError):
    """The linear norm vanished, so the ratio is undefined."""


# -- grids ---------------------------------------------------------------------

def _frange(start: float, stop: float, step: float) -> List[float]:
    count = int(round((stop - start) / step))
    return [start + k * step for k in range(count + 1)]


@dataclass(frozen=True)
class EvaluationGrid:
    """Sorted sample times and speeds, both nonnegative."""

    times: tuple
    speeds: tuple

    def __post_init__(self):
        for name in ("times", "speeds"):
            vals = tuple(float(x) for x in getattr(self, name))
            if not vals:
                raise ValueError(f"{name} must be nonempty")
            if any(not math.isfinite(x) or x < 0 for x in vals):
                raise ValueError(f"{name} must be finite and nonnegative")
            if list(vals) != sorted(vals):
                raise ValueError(f"{name} must be sorted")
            object.__setattr__(self, name, vals)


def signed_velocities(v_max: float = 5.0, step: float = 0.125) -> List[float]:
    """Symmetric velocity axis ``-v_max .. v_max`` used by the profile tables."""
    return _frange(-v_max, v_max, step)


def default_times(t_max: float = 2.0, step: float = 0.08) -> List[float]:
    return _frange(0.0, t_max, step)


def default_grid() -> EvaluationGrid:
    """``t`` in ``[0, 2]`` step 0.08 and ``|v|`` for ``v`` in ``[-5, 5]`` step 0.125."""
    speeds = sorted({abs(v) for v in signed_velocities()})
    return EvaluationGrid(times=tuple(default_times()), speeds=tuple(speeds))


# -- pointwise evaluation ------------------------------------------------------

@lru_cache(maxsize=16)
def _basis_at(n_max: int, prec: int) -> BasisFunctionTable:
    return BasisFunctionTable(n_max)


def _basis(n_max: int) -> BasisFunctionTable:
    # the table stores constants at build precision, so key on it
    return _basis_at(n_max, mp.prec)


def g_values(series: SolutionSeries, t) -> list:
    """``[g_0(t), ..., g_N(t)]`` at the series precision."""
    with mp.workdps(series.digits):
        return [series.g(n).eval(t) for n in range(series.N + 1)]


def _f_from_g(gv: Sequence, v, table: BasisFunctionTable):
    phis = table.phi_all(v)
    return mu(v) + sqrt_mu(v) * mp.fsum(g * p for g, p in zip(gv, phis))


def eval_f(series: SolutionSeries, t, v):
    """``f_N(t, |v|)``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    with mp.workdps(series.digits):
        return _f_from_g(g_values(series, t), abs(mp.mpf(v)), _basis(series.N))


def eval_surface(series: SolutionSeries, times: Sequence, speeds: Sequence) -> List[list]:
    """``f_N`` on a tensor grid, one row per time."""
    with mp.workdps(series.digits):
        table = _basis(series.N)
        phis = [(mu(v), sqrt_mu(v), table.phi_all(abs(mp.mpf(v)))) for v in speeds]
        rows = []
        for t in times:
            gv = g_values(series, t)
            rows.append([m + s * mp.fsum(g * p for g, p in zip(gv, ph)) for m, s, ph in phis])
    return rows


def eval_truncated_data(coeffs: SpectralCoeffs, N: int, v):
    """``mu + sqrt(mu) sum_{n<=N} G_n phi_n`` at ``|v|``, the initial projection."""
    vals = list(coeffs.values[: N + 1])
    return _f_from_g(vals, abs(mp.mpf(v)), _basis(len(vals) - 1))


# -- norms ---------------------------------------------------------------------

def l2_linear(series: SolutionSeries, t):
    """``(sum_{n>=2} (exp(-lambda_n t) G_n)^2)^(1/2)``."""
    with mp.workdps(series.digits):
        t = mp.mpf(t)
        lam = series.eigen.lambda_num
        return mp.sqrt(mp.fsum((mp.exp(-lam[n] * t) * series.G(n)) ** 2
                               for n in range(2, series.N + 1)))


def l2_nonlinear(series: SolutionSeries, t):
    """``(sum_{n>=4} (exp(-lambda_n t) h_n(t))^2)^(1/2)``."""
    with mp.workdps(series.digits):
        t = mp.mpf(t)
        lam = series.eigen.lambda_num
        return mp.sqrt(mp.fsum((mp.exp(-lam[n] * t) * series.h[n].eval(t)) ** 2
                               for n in range(4, series.N + 1)))


def l2_total(series: SolutionSeries, t):
    """``||g_N(t)||`` over all modes."""
    return mp.sqrt(mp.fsum(g ** 2 for g in g_values(series, t)))


def ratio(series: SolutionSeries, t):
    """``R_N(t) = l2_nonlinear / l2_linear``."""
    lin = l2_linear(series, t)
    if lin == 0:
        raise DivisionByZero("linear part vanishes; ratio undefined")
    with mp.workdps(series.digits):
        return l2_nonlinear(series, t) / lin


def ratio_approx(series: SolutionSeries, t):
    """Leading-order ratio from the ``h_4`` mode alone.

    ``c4 exp(-(l4 - l2) t) |G_2| (1 - exp(-(2 l2 - l4) t))`` with
    ``c4 = mu_22 / (2 l2 - l4)``, the ``h_4`` amplitude per ``G_2^2``.
    """
    with mp.workdps(series.digits):
        t = mp.mpf(t)
        lam = series.eigen.lambda_num
        gap = 2 * lam[2] - lam[4]
        c4 = series.eigen.mu_value(2, 2, series.digits) / gap
        return c4 * mp.exp(-(lam[4] - lam[2]) * t) * abs(series.G(2)) * (1 - mp.exp(-gap * t))


# -- tails ---------------------------------------------------------------------

def linear_tail_norm(coeffs: SpectralCoeffs, eigen: Optional[EigenTable], N: int,
                     M: Optional[int] = None, t=1):
    """``(sum_{n=N+1}^M exp(-2 lambda_n t) G_n^2)^(1/2)``.

    A finite stand-in for the linear truncation error; it underestimates the
    infinite tail.  ``M`` defaults to ``4N``.
    """
    M = 4 * N if M is None else M
    if M <= N:
        raise ValueError("M must exceed N")
    if t <= 0:
        raise ValueError("t must be positive")
    if len(coeffs.values) < M + 1:
        raise ValueError(f"need coefficients up to n={M}")
    t = mp.mpf(t)
    return mp.sqrt(mp.fsum(mp.exp(-2 * _lam(eigen, n) * t) * mp.mpf(coeffs.values[n]) ** 2
                           for n in range(N + 1, M + 1)))


def _lam(eigen: Optional[EigenTable], n: int):
    # beyond the table, fall back to the closed form (sin^-2 kernel only)
    if eigen is not None and n <= eigen.n_max:
        return eigen.lam(n)
    if eigen is not None and not eigen.kernel.is_exact:
        raise ValueError(f"eigen table stops at {eigen.n_max} < {n}")
    return to_float(lambda_exact(n), mp.dps)


def measure_tail_bound(eigen: Optional[EigenTable], M: int, t):
    """Integral-criterion bound on ``sum_{n>M}`` for the measure data.

    Uses ``G_n^2 <= (2n+1)/sqrt(pi n) <= 3 sqrt(n/pi)`` and
    ``lambda_n >= c sqrt(n)`` with ``c = lambda_M / sqrt(M)``, which holds for
    ``n >= M`` because ``lambda_n / sqrt(n)`` increases.  The result bounds the
    squared tail beyond ``M``; the summand must decrease past ``M``, which needs
    ``c t sqrt(M) >= 1/2``.
    """
    t = mp.mpf(t)
    c = _lam(eigen, M) / mp.sqrt(M)
    if c * t * mp.sqrt(M) < mp.mpf(1) / 2:
        raise ValueError("summand not yet decreasing at M; raise M or t")
    integrand = lambda x: 3 * mp.sqrt(x / mp.pi) * mp.exp(-2 * c * mp.sqrt(x) * t)
    return mp.quad(integrand, [M, mp.inf])


# -- conservation ----------------------------------------------------------------

@lru_cache(maxsize=8)
def _moment_weights(N: int, digits: int):
    # a_n = int sqrt(mu) phi_n, b_n = int |v|^2 sqrt(mu) phi_n by radial quadrature
    with mp.workdps(digits + 5):
        rs, ws = radial_rule(digits)
        table = BasisFunctionTable(N)
        a = [mp.zero] * (N + 1)
        b = [mp.zero] * (N + 1)
        for r, w in zip(rs, ws):
            sm = sqrt_mu(r) * w
            for n, p in enumerate(table.phi_all(r)):
                a[n] += sm * p
                b[n] += sm * p * r * r
    return tuple(a), tuple(b)


@dataclass
class ConservationReport:
    ok: bool
    tol: float
    rows: list = field(default_factory=list)  # (t, mass, second_moment)
    violations: list = field(default_factory=list)


def conservation_check(series: SolutionSeries, t_grid: Sequence) -> ConservationReport:
    """Mass and second moment of ``f_N`` at each time.

    ``g_0`` and ``g_1`` must be identically zero; mass must equal 1 and the
    second moment 3 to ``10^-(digits-10)``.
    """
    tol = 10.0 ** -(series.digits - 10)
    report = ConservationReport(ok=True, tol=tol)
    for n in (0, 1):
        if series.N >= n and series.g(n):
            report.ok = False
            report.violations.append(f"g_{n} is not identically zero")
    a, b = _moment_weights(series.N, series.digits)
    with mp.workdps(series.digits):
        for t in t_grid:
            gv = g_values(series, t)
            mass = 1 + mp.fsum(g * x for g, x in zip(gv, a))
            m2 = 3 + mp.fsum(g * x for g, x in zip(gv, b))
            report.rows.append((float(t), mass, m2))
            if abs(mass - 1) > tol:
                report.ok = False
                report.violations.append(f"mass {mp.nstr(mass, 20)} at t={t}")
            if abs(m2 - 3) > tol:
                report.ok = False
                report.violations.append(f"second moment {mp.nstr(m2, 20)} at t={t}")
    return report


# -- precision study -------------------------------------------------------------

def precision_compare(P1: int, P2: int, make_coeffs: Callable[[int], SpectralCoeffs],
                      N: int = 20, grid: Optional[EvaluationGrid] = None):
    """``||f^P1 - f^P2||_inf / ||f^P2||_inf`` over ``grid``.

    The whole pipeline (data, eigenvalues, recursion, evaluation) is rerun at
    each precision.  ``P1 == P2`` is allowed and returns zero.
    """
    if P1 > P2:
        raise ValueError("need P1 <= P2")
    grid = grid or default_grid()

    def run(P):
        with mp.workdps(P):
            series = solve(make_coeffs(P), N=N, digits=P)
            return eval_surface(series, grid.times, grid.speeds)

    low, high = run(P1), run(P2)
    with mp.workdps(P2 + 10):
        num = max(abs(x - y) for rl, rh in zip(low, high) for x, y in zip(rl, rh))
        den = max(abs(y) for rh in high for y in rh)
        return num / den


# -- CSV emitters ----------------------------------------------------------------

def _fmt(x, digits: int) -> str:
    return mp.nstr(mp.mpf(x), digits, min_fixed=-5, max_fixed=5)


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_initial_csv(path, F: Callable, coeffs: SpectralCoeffs, velocities=None,
                      orders=(5, 10, 20), digits: int = 15) -> None:
    """Columns ``v, F, F_5, F_10, F_20``: data and its truncated projections."""
    velocities = signed_velocities() if velocities is None else velocities
    if len(coeffs.values) < max(orders) + 1:
        raise ValueError(f"need coefficients up to n={max(orders)}")
    rows = []
    with mp.workdps(digits + 10):
        for v in velocities:
            r = abs(mp.mpf(v))
            rows.append([_fmt(v, digits), _fmt(F(r), digits)]
                        + [_fmt(eval_truncated_data(coeffs, k, r), digits) for k in orders])
    _write(path, ["v", "F"] + [f"F_{k}" for k in orders], rows)


def write_norms_csv(path, series: SolutionSeries, times=None, digits: int = 15) -> None:
    """Columns ``t, lin, nonlin, R_N, R_tilde`` (``R_20`` for the default ``N``)."""
    times = default_times() if times is None else times
    rows = []
    for t in times:
        lin, nl = l2_linear(series, t), l2_nonlinear(series, t)
        r = nl / lin if lin != 0 else mp.nan
        rows.append([_fmt(t, digits), _fmt(lin, digits), _fmt(nl, digits), _fmt(r, digits),
                     _fmt(ratio_approx(series, t), digits)])
    _write(path, ["t", "lin", "nonlin", f"R_{series.N}", "R_tilde"], rows)


def write_surface_csv(path, series: SolutionSeries, times=None, velocities=None,
                      digits: int = 15) -> None:
    """Long-format ``t, v, f_N`` rows."""
    times = default_times() if times is None else times
    velocities = signed_velocities() if velocities is None else velocities
    surf = eval_surface(series, times, velocities)
    rows = [[_fmt(t, digits), _fmt(v, digits), _fmt(f, digits)]
            for t, row in zip(times, surf) for v, f in zip(velocities, row)]
    _write(path, ["t", "v", "f_N"], rows)


def write_hn_csv(path, series: SolutionSeries, times=None, digits: int = 15) -> None:
    """Long-format ``n, t, h_n`` rows for ``n = 4..N``."""
    times = default_times() if times is None else times
    rows = []
    with mp.workdps(series.digits):
        for n in range(4, series.N + 1):
            for t in times:
                rows.append([n, _fmt(t, digits), _fmt(series.h[n].eval(t), digits)])
    _write(path, ["n", "t", "h_n"], rows)
