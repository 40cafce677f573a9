"""Spectral coordinates ``G_n = (G, phi_n)`` of normalized initial data.

Radial data ``F~`` is first rescaled to unit mass and second moment 3, which
puts ``G = (F - mu)/sqrt(mu)`` orthogonal to the collision invariants.  The
measure datum ``mu + delta`` and its Gaussian regularization have closed-form
coordinates.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Sequence

from mpmath import mp

from .basis import BasisFunctionTable, mu, radial_rule, sqrt_mu

PROJECTED = "Projected"
MEASURE = "MeasureClosedForm"
USER = "UserSupplied"


def eps_source(eps) -> str:
    return f"EpsApprox({eps})"


class DegenerateData(ValueError):
    """Initial data with nonpositive mass or second moment."""


class QuadratureFailure(ArithmeticError):
    """Projection residue in the invariant directions exceeds quadrature noise."""


@dataclass(frozen=True)
class RescaleParams:
    alpha: object
    beta: object

    def apply(self, F_tilde: Callable) -> Callable:
        """``F(v) = alpha * F~(beta v)``."""
        return lambda v: self.alpha * F_tilde(self.beta * v)


@dataclass
class SpectralCoeffs:
    values: List
    source: str = USER

    def __post_init__(self):
        self.values = list(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def truncated(self, N: int) -> SpectralCoeffs:
        return SpectralCoeffs(self.values[: N + 1], self.source)


def rescale_params(mass, second_moment) -> RescaleParams:
    """``alpha = (m2/3)^(3/2) / m0^(5/2)``, ``beta = (m2/3)^(1/2) / m0^(1/2)``."""
    if not mass > 0 or not second_moment > 0:
        raise DegenerateData("mass and second moment must be positive")
    m0 = mp.mpf(mass)
    e = mp.mpf(second_moment) / 3
    return RescaleParams(alpha=e ** (mp.mpf(3) / 2) / m0 ** (mp.mpf(5) / 2),
                         beta=mp.sqrt(e) / mp.sqrt(m0))


BIGAUSS_SHIFT = 2


def bigauss(w, shift=BIGAUSS_SHIFT):
    """``(2 pi)^(-3/2) (exp(-(|w|+a)^2/2) + exp(-(|w|-a)^2/2))`` with ``a = shift``.

    The default ``a = 2`` is the shell profile whose rescaled form matches the
    reference bi-Gaussian curves (``F(0) = 0.00834136``, ``||G|| = 0.373528``).
    ``a = 1`` gives a much flatter profile.
    """
    w = mp.mpf(w)
    a = mp.mpf(shift)
    return (2 * mp.pi) ** (-mp.mpf(3) / 2) * (mp.exp(-(w + a) ** 2 / 2) + mp.exp(-(w - a) ** 2 / 2))


def radial_moments(F_tilde: Callable, digits: int):
    """``(int F~, int |w|^2 F~)`` over ``R^3``."""
    rs, ws = radial_rule(digits)
    vals = [F_tilde(r) for r in rs]
    m0 = mp.fsum(w * f for w, f in zip(ws, vals))
    m2 = mp.fsum(w * r * r * f for w, r, f in zip(ws, rs, vals))
    return m0, m2


def project(G: Callable, N: int, digits: int) -> list:
    """``[(G, phi_n) for n <= N]`` by radial Gauss-Legendre quadrature."""
    rs, ws = radial_rule(digits)
    table = BasisFunctionTable(N)
    out = [mp.zero] * (N + 1)
    for r, w in zip(rs, ws):
        gw = G(r) * w
        for n, p in enumerate(table.phi_all(r)):
            out[n] += gw * p
    return out


def normalized_function(F_tilde: Callable, digits: int) -> tuple:
    """Rescaled ``F`` together with the parameters used."""
    m0, m2 = radial_moments(F_tilde, digits)
    params = rescale_params(m0, m2)
    return params.apply(F_tilde), params


def project_function_data(F_tilde: Callable, N: int, digits: int = 30) -> SpectralCoeffs:
    """Coordinates of rescaled radial data; ``G_0, G_1`` snapped to zero."""
    with mp.workdps(digits + 5):
        F, _ = normalized_function(F_tilde, digits)
        vals = project(lambda r: (F(r) - mu(r)) / sqrt_mu(r), max(N, 1), digits)
        threshold = mp.mpf(10) ** (-mp.mpf(digits) / 2)
        if abs(vals[0]) > threshold or abs(vals[1]) > threshold:
            raise QuadratureFailure(
                f"|G_0|={mp.nstr(abs(vals[0]), 3)}, |G_1|={mp.nstr(abs(vals[1]), 3)} exceed {mp.nstr(threshold, 3)}")
    with mp.workdps(digits):
        values = [mp.zero, mp.zero] + [+v for v in vals[2: N + 1]]
    return SpectralCoeffs(values[: N + 1], PROJECTED)


def bigauss_coeffs(N: int, digits: int = 30, shift=BIGAUSS_SHIFT) -> SpectralCoeffs:
    return project_function_data(lambda w: bigauss(w, shift), N, digits)


def _central_ratio_sqrt(n: int):
    # sqrt((2n+1)! / (2^(2n) (n!)^2)) in log form
    return mp.exp((mp.loggamma(2 * n + 2) - 2 * n * mp.log(2) - 2 * mp.loggamma(n + 1)) / 2)


def measure_coeffs(N: int, digits: int = 30) -> SpectralCoeffs:
    """Closed-form coordinates of the rescaled ``mu + delta``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    with mp.workdps(digits):
        values = [mp.zero, mp.zero] + [
            (+_central_ratio_sqrt(n) if n % 2 == 0 else mp.zero) for n in range(2, N + 1)]
    return SpectralCoeffs(values, MEASURE)


def eps_coeffs(N: int, eps, digits: int = 30) -> SpectralCoeffs:
    """Coordinates of the Gaussian regularization ``mu + eps^-3 mu(./eps)``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    with mp.workdps(digits):
        e2 = mp.mpf(eps) ** 2
        damp = (1 - e2) / (1 + e2)
        values = [mp.zero, mp.zero] + [
            (damp ** n * _central_ratio_sqrt(n) if n % 2 == 0 else mp.zero) for n in range(2, N + 1)]
    return SpectralCoeffs(values, eps_source(eps))


def eps_function(eps) -> Callable:
    """Explicit ``G_eps(v)`` of the rescaled regularized data."""
    eps = mp.mpf(eps)
    c = 2 ** (-mp.mpf(5) / 2) * (1 + eps ** 2) ** (mp.mpf(3) / 2)
    return lambda v: -sqrt_mu(v) + c * (sqrt_mu(eps * v) + sqrt_mu(v / eps) / eps ** 3)


def measure_regular_part(v):
    """``F_reg(v) = 2^(-5/2) mu(v / sqrt 2)``."""
    return 2 ** (-mp.mpf(5) / 2) * mu(v / mp.sqrt(2))


def user_coeffs(values: Sequence) -> SpectralCoeffs:
    vals = [mp.mpf(v) for v in values]
    if len(vals) < 2 or vals[0] != 0 or vals[1] != 0:
        raise ValueError("user coefficients must start with G_0 = G_1 = 0")
    return SpectralCoeffs(vals, USER)


# -- files ---------------------------------------------------------------------

def write_csv(coeffs: SpectralCoeffs, path, digits: int = 30) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "G_n"])
        for n, g in enumerate(coeffs.values):
            w.writerow([n, mp.nstr(mp.mpf(g), digits, min_fixed=1, max_fixed=0)])


def read_csv(path) -> SpectralCoeffs:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["n", "G_n"]:
        raise ValueError(f"{path}: expected header 'n,G_n'")
    entries = {}
    for row in rows[1:]:
        if not row:
            continue
        entries[int(row[0])] = mp.mpf(row[1].strip())
    if sorted(entries) != list(range(len(entries))):
        raise ValueError(f"{path}: indices must run 0..N without gaps")
    return user_coeffs([entries[n] for n in range(len(entries))])


def write_json(coeffs: SpectralCoeffs, path, digits: int = 30) -> None:
    Path(path).write_text(json.dumps({
        "source": coeffs.source,
        "G": [mp.nstr(mp.mpf(g), digits, min_fixed=1, max_fixed=0) for g in coeffs.values],
    }, indent=1))


def read_json(path) -> SpectralCoeffs:
    obj = json.loads(Path(path).read_text())
    coeffs = user_coeffs(obj["G"])
    coeffs.source = obj.get("source", USER)
    return coeffs
