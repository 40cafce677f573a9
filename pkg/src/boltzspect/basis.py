"""Radial eigenfunctions of the linearized Maxwellian collision operator.

``phi_n(r) = c_n * exp(-r^2/4) * L_n^(1/2)(r^2/2) / sqrt(4 pi)`` with
``c_n = (n! / (sqrt(2) Gamma(n + 3/2)))^(1/2)``; the family is orthonormal in
``L^2(R^3)`` restricted to radial functions.  Everything here is a function of
the speed ``r = |v|`` and is evaluated at the ambient mpmath precision.
"""

from __future__ import annotations

import math
from functools import lru_cache

from mpmath import mp
from mpmath.calculus.quadrature import GaussLegendre

LAGUERRE_ALPHA = mp.mpf(1) / 2


def log_normalization(n: int):
    """``log c_n - log sqrt(4 pi)``, computed without forming factorials."""
    return (mp.loggamma(n + 1) - mp.log(2) / 2 - mp.loggamma(n + mp.mpf(3) / 2)) / 2 \
        - mp.log(4 * mp.pi) / 2


def laguerre_half(n_max: int, x) -> list:
    """``[L_0^(1/2)(x), ..., L_{n_max}^(1/2)(x)]`` by the ascending recurrence."""
    a = LAGUERRE_ALPHA
    vals = [mp.one]
    if n_max >= 1:
        vals.append(1 + a - x)
    for k in range(1, n_max):
        vals.append(((2 * k + 1 + a - x) * vals[k] - (k + a) * vals[k - 1]) / (k + 1))
    return vals


class BasisFunctionTable:
    """Normalization constants for ``phi_0 .. phi_{n_max}``.

    The constants are held in log form, so ``n_max`` in the hundreds does not
    overflow anything.
    """

    def __init__(self, n_max: int):
        if n_max < 0:
            raise ValueError("n_max must be nonnegative")
        self.n_max = n_max
        with mp.extraprec(20):
            self._log_norm = tuple(log_normalization(n) for n in range(n_max + 1))

    def normalization(self, n: int):
        return mp.exp(self._log_norm[n])

    def phi_all(self, v) -> list:
        """All basis values at speed ``v``."""
        v = mp.mpf(v)
        x = v * v / 2
        lag = laguerre_half(self.n_max, x)
        damp = mp.exp(-x / 2)
        return [mp.exp(self._log_norm[n]) * damp * lag[n] for n in range(self.n_max + 1)]

    def phi(self, n: int, v):
        if not 0 <= n <= self.n_max:
            raise ValueError(f"n={n} outside 0..{self.n_max}")
        v = mp.mpf(v)
        x = v * v / 2
        return mp.exp(self._log_norm[n]) * mp.exp(-x / 2) * laguerre_half(n, x)[n]


def phi_eval(n: int, v):
    return BasisFunctionTable(n).phi(n, v)


def phi_at_zero(n: int):
    """``(2 pi)^(-3/4) * sqrt((2n+1)! / (2^(2n) (n!)^2))``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    with mp.extraprec(20):
        log_ratio = mp.loggamma(2 * n + 2) - 2 * n * mp.log(2) - 2 * mp.loggamma(n + 1)
        val = mp.exp(log_ratio / 2 - mp.mpf(3) / 4 * mp.log(2 * mp.pi))
    return +val


def integral_phi(n: int):
    """``int_{R^3} phi_n dv = (-1)^n 8 pi^(3/2) phi_n(0)``."""
    sign = -1 if n % 2 else 1
    return sign * 8 * mp.pi ** (mp.mpf(3) / 2) * phi_at_zero(n)


def gaussian_inner(a, n: int):
    """``(sqrt(mu(a .)), phi_n)`` in ``L^2(R^3)``.

    The factor ``(1 - a^2)^n`` is formed directly, so ``a = 1`` gives an
    exact zero for every ``n >= 1``.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    a = mp.mpf(a)
    a2 = a * a
    one_minus = 1 - a2
    if one_minus == 0:
        return mp.one if n == 0 else mp.zero
    return (2 ** (mp.mpf(9) / 4) * mp.pi ** (mp.mpf(3) / 4) * phi_at_zero(n)
            * one_minus ** n / (1 + a2) ** (n + mp.mpf(3) / 2))


def mu(v):
    """Standard Maxwellian ``(2 pi)^(-3/2) exp(-|v|^2 / 2)``."""
    v = mp.mpf(v)
    return (2 * mp.pi) ** (-mp.mpf(3) / 2) * mp.exp(-v * v / 2)


def sqrt_mu(v):
    v = mp.mpf(v)
    return (2 * mp.pi) ** (-mp.mpf(3) / 4) * mp.exp(-v * v / 4)


# -- radial quadrature -------------------------------------------------------

GL_DEGREE = 8  # mpmath degree 8 -> 384 Gauss-Legendre nodes


def radial_cutoff(digits: int) -> float:
    """Upper radius beyond which ``exp(-R^2/4) * poly`` is below ``10^-digits``."""
    return 2 * math.sqrt(digits * math.log(10)) + 6.0


@lru_cache(maxsize=16)
def _gl_nodes(prec: int, degree: int):
    return tuple(GaussLegendre(mp).calc_nodes(degree, prec))


def radial_rule(digits: int, radius: float | None = None, degree: int = GL_DEGREE):
    """Nodes and weights for ``int_0^R u(r) 4 pi r^2 dr`` at ambient precision.

    Returns two lists ``(r, w)`` with the ``4 pi r^2`` Jacobian folded into
    ``w``.
    """
    R = mp.mpf(radius if radius is not None else radial_cutoff(digits))
    nodes = _gl_nodes(mp.prec, degree)
    half = R / 2
    rs, ws = [], []
    four_pi = 4 * mp.pi
    for x, w in nodes:
        r = half * (x + 1)
        rs.append(r)
        ws.append(w * half * four_pi * r * r)
    return rs, ws
