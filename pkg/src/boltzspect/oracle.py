"""Reference integration of the truncated coefficient ODE system.

    g_n' = -lambda_n g_n + sum_{p=2}^{n-2} mu_{p,n-p} g_p g_{n-p}

in double precision.  The eigenvalues come from direct quadrature of the
kernel rather than the closed forms, so agreement with the exponential-sum
solver is an end-to-end check.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from mpmath import mp

from .eigenvalues import EigenTable, build_table
from .initial_data import SpectralCoeffs
from .solver import SolutionSeries

RK4 = "rk4"
RK45 = "rk45"


class StepSizeUnderflow(ArithmeticError):
    """The adaptive stepper could not meet its tolerance."""


class ShapeMismatch(ValueError):
    """Oracle run and series disagree on truncation order."""


@dataclass
class OdeRun:
    N: int
    t_grid: np.ndarray
    values: np.ndarray  # shape (N + 1, len(t_grid))
    stepper: str
    step: Optional[float] = None
    tol: Optional[float] = None


def oracle_table(N: int, tol: float = 1e-13) -> EigenTable:
    """Quadrature-based eigenvalues for the sin^-2 kernel."""
    return build_table(max(N, 2), numeric="quadrature", digits=20, tol=tol)


def _system(eigen: EigenTable, N: int):
    lam = np.array([float(eigen.lam(n)) for n in range(N + 1)])
    B = np.zeros((N + 1, N + 1, N + 1))
    for n in range(4, N + 1):
        for p in range(2, n - 1):
            B[n, p, n - p] = float(eigen.mu(p, n - p))
    return lam, B


def _rhs(lam, B):
    def f(g):
        return -lam * g + np.einsum("npq,p,q->n", B, g, g)
    return f


def _rk4_step(f, g, h):
    k1 = f(g)
    k2 = f(g + 0.5 * h * k1)
    k3 = f(g + 0.5 * h * k2)
    k4 = f(g + h * k3)
    return g + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(coeffs: SpectralCoeffs, N: int, t_grid: Sequence[float],
              eigen: Optional[EigenTable] = None, stepper: str = RK4,
              step: float = 1e-4, tol: float = 1e-12) -> OdeRun:
    """Integrate from ``t = 0`` and record ``g_n`` at each time in ``t_grid``.

    RK4 takes a whole number of equal substeps per grid interval, each no
    longer than ``step``.
    """
    t_grid = np.asarray(sorted(float(t) for t in t_grid))
    if t_grid.size == 0 or t_grid[0] < 0 or t_grid[-1] <= 0:
        raise ValueError("t_grid must be nonempty, nonnegative, and reach t > 0")
    eigen = eigen or oracle_table(N)
    if N > eigen.n_max:
        raise ValueError(f"N={N} exceeds eigen table size {eigen.n_max}")
    if len(coeffs.values) < N + 1:
        raise ValueError(f"need coefficients up to n={N}")
    lam, B = _system(eigen, N)
    f = _rhs(lam, B)
    g0 = np.array([float(mp.mpf(c)) for c in coeffs.values[: N + 1]])
    g0[:2] = 0.0

    if stepper == RK4:
        out = np.empty((N + 1, t_grid.size))
        g, t = g0.copy(), 0.0
        for i, target in enumerate(t_grid):
            span = target - t
            if span > 0:
                k = max(1, int(np.ceil(span / step - 1e-9)))
                h = span / k
                for _ in range(k):
                    g = _rk4_step(f, g, h)
                t = target
            out[:, i] = g
        return OdeRun(N=N, t_grid=t_grid, values=out, stepper=RK4, step=step)

    if stepper == RK45:
        from scipy.integrate import solve_ivp

        sol = solve_ivp(lambda _t, y: f(y), (0.0, float(t_grid[-1])), g0, method="RK45",
                        t_eval=t_grid, rtol=tol, atol=tol * 1e-2)
        if not sol.success:
            raise StepSizeUnderflow(sol.message)
        return OdeRun(N=N, t_grid=t_grid, values=sol.y, stepper=RK45, tol=tol)

    raise ValueError(f"unknown stepper {stepper!r}")


@dataclass
class Comparison:
    per_n: List[float]
    max_dev: float


def compare(run: OdeRun, series: SolutionSeries, t_min: float = 0.0) -> Comparison:
    """Sup deviation per mode over grid times ``>= t_min``."""
    if run.N != series.N:
        raise ShapeMismatch(f"oracle N={run.N} but series N={series.N}")
    mask = run.t_grid >= t_min
    times = run.t_grid[mask]
    per_n = []
    with mp.workdps(series.digits):
        for n in range(run.N + 1):
            exact = np.array([float(series.g(n).eval(t)) for t in times])
            dev = np.abs(run.values[n, mask] - exact)
            per_n.append(float(dev.max()) if dev.size else 0.0)
    return Comparison(per_n=per_n, max_dev=max(per_n) if per_n else 0.0)


def write_csv(run: OdeRun, path) -> None:
    """Rows ``t, g_0, ..., g_N``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"g_{n}" for n in range(run.N + 1)])
        for i, t in enumerate(run.t_grid):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in run.values[:, i]])
