"""Angular collision kernels and quadrature for their singular integrands."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from mpmath import mp

EXACT_INV_SIN_SQ = "exact_inv_sin_sq"
POWER_LAW = "power_law"
CUSTOM = "custom"
_FORMS = (EXACT_INV_SIN_SQ, POWER_LAW, CUSTOM)

MAX_LEVELS = 12


class NonConvergence(ArithmeticError):
    """Quadrature error estimate stayed above the requested tolerance."""


@dataclass(frozen=True)
class KernelSpec:
    """Angular part ``beta(theta)`` of a non-cutoff Maxwellian kernel.

    ``beta(theta) * theta**(1 + 2*s)`` must stay bounded near zero.  A custom
    ``beta`` is called with mpmath numbers and may be invoked from several
    threads at once, so it has to be a pure function.
    """

    form: str = EXACT_INV_SIN_SQ
    s: float = 0.5
    custom_beta: Optional[Callable] = None

    def __post_init__(self):
        if self.form not in _FORMS:
            raise ValueError(f"unknown kernel form {self.form!r}")
        if not 0 < self.s < 1:
            raise ValueError("singularity exponent s must lie in (0, 1)")
        if self.form == EXACT_INV_SIN_SQ and self.s != 0.5:
            raise ValueError("the sin^-2 kernel has s = 1/2")
        if self.form == CUSTOM and self.custom_beta is None:
            raise ValueError("custom kernel needs a beta callable")

    @classmethod
    def exact(cls) -> KernelSpec:
        return cls(EXACT_INV_SIN_SQ, 0.5)

    @classmethod
    def power_law(cls, s: float) -> KernelSpec:
        return cls(POWER_LAW, s)

    @classmethod
    def custom(cls, beta: Callable, s: float) -> KernelSpec:
        return cls(CUSTOM, s, beta)

    @property
    def is_exact(self) -> bool:
        return self.form == EXACT_INV_SIN_SQ

    def beta(self, theta):
        if self.form == EXACT_INV_SIN_SQ:
            return 1 / mp.sin(theta) ** 2
        if self.form == POWER_LAW:
            return theta ** (-1 - 2 * mp.mpf(self.s))
        return self.custom_beta(theta)

    def to_json(self) -> dict:
        return {"form": self.form, "s": self.s}

    @classmethod
    def from_json(cls, obj: dict) -> KernelSpec:
        form = obj["form"]
        if form == CUSTOM:
            raise ValueError("custom kernels carry a callable and cannot be deserialized")
        return cls(form, float(obj["s"]))


def singular_quadrature(f: Callable, decay_order: int = 0, tol: float = 1e-12):
    """Integrate ``f`` over ``(0, pi/4]`` with tanh-sinh nodes.

    Parameters
    ----------
    f : callable
        Integrand taking an mpmath number.  It may be singular (integrably) or
        numerically fragile at ``theta = 0``.
    decay_order : int
        Caller's promise that ``f(theta) * theta**-decay_order`` is bounded near
        zero.  For ``decay_order >= 1`` nodes so close to zero that their
        contribution is below ``tol`` by that bound are skipped; this avoids
        evaluating cancellation-prone expressions where they are meaningless.
    tol : float
        Relative tolerance on the returned value.

    Returns
    -------
    mpmath.mpf
        The integral, at the ambient precision raised to cover ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    dps = max(mp.dps, int(-math.log10(tol)) + 10)
    with mp.workdps(dps):
        if decay_order >= 1:
            cut = mp.mpf(tol) ** (mp.mpf(1) / (decay_order + 1)) * mp.mpf(10) ** -3
            g = lambda t: f(t) if t > cut else mp.zero  # noqa: E731
        else:
            g = f
        val, err = mp.quad(g, [0, mp.pi / 4], method="tanh-sinh",
                           error=True, maxdegree=MAX_LEVELS)
        scale = abs(val) if val != 0 else mp.one
        if err > tol * scale:
            raise NonConvergence(
                f"tanh-sinh error estimate {mp.nstr(err, 3)} above tol {tol} "
                f"after {MAX_LEVELS} levels")
    return +val
