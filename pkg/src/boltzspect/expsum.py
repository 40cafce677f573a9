"""Finite sums ``sum_k c_k exp(-r_k t)`` with exact rates.

Rates are :class:`PiRational` keys, so like terms combine exactly and never
need a clustering tolerance.  Coefficients are mpmath floats at whatever
precision the caller is working in.
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, Mapping, Tuple

import numpy as np
from mpmath import mp

from .exact_arith import ZERO, PiRational

GUARD_DIGITS = 10


class ResonantRate(ArithmeticError):
    """A shifted rate vanished, which would produce a secular ``t`` term."""


def _coeff_to_str(c, digits: int) -> str:
    return mp.nstr(c, digits, min_fixed=1, max_fixed=0)


class ExpSum:
    """Immutable map from exact decay rate to coefficient.

    Exact-zero coefficients are never stored.  ``prune_threshold`` drops any
    coefficient of smaller magnitude when the sum is built (0 keeps all).
    """

    __slots__ = ("_terms", "_lowered")

    def __init__(self, terms: Mapping[PiRational, object] | Iterable[Tuple[PiRational, object]] = (),
                 prune_threshold: float = 0.0):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[PiRational, object] = {}
        for rate, c in items:
            if rate in acc:
                acc[rate] = acc[rate] + c
            else:
                acc[rate] = mp.mpf(c)
        self._terms = {r: c for r, c in acc.items()
                       if c != 0 and not (prune_threshold and abs(c) < prune_threshold)}
        self._lowered = {}

    @classmethod
    def constant(cls, c) -> ExpSum:
        return cls({ZERO: c})

    @classmethod
    def term(cls, c, rate: PiRational) -> ExpSum:
        return cls({rate: c})

    # -- container protocol ----------------------------------------------
    @property
    def terms(self) -> Dict[PiRational, object]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[PiRational, object]]:
        return iter(self._terms.items())

    def rates(self):
        return list(self._terms)

    def coeff(self, rate: PiRational):
        return self._terms.get(rate, mp.zero)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpSum):
            return NotImplemented
        return self._terms == other._terms

    def __repr__(self) -> str:
        body = ", ".join(f"{mp.nstr(c, 6)}*exp(-({r})t)" for r, c in self._terms.items())
        return f"ExpSum({body})"

    # -- algebra ---------------------------------------------------------
    def __add__(self, other: ExpSum) -> ExpSum:
        if not isinstance(other, ExpSum):
            return NotImplemented
        return ExpSum(list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self) -> ExpSum:
        return ExpSum({r: -c for r, c in self._terms.items()})

    def __sub__(self, other: ExpSum) -> ExpSum:
        return self + (-other)

    def scale(self, factor) -> ExpSum:
        return ExpSum({r: c * factor for r, c in self._terms.items()})

    def __mul__(self, other: ExpSum) -> ExpSum:
        if not isinstance(other, ExpSum):
            return NotImplemented
        return multiply(self, other)

    def shift(self, rate: PiRational) -> ExpSum:
        """Multiply by ``exp(-rate t)``."""
        return ExpSum({r + rate: c for r, c in self._terms.items()})

    def derivative(self) -> ExpSum:
        return ExpSum({r: -c * r.to_mpf() for r, c in self._terms.items()})

    # -- evaluation ------------------------------------------------------
    def _lowered_terms(self):
        key = mp.prec
        if key not in self._lowered:
            with mp.extraprec(10):
                self._lowered[key] = [(r.to_mpf(), c) for r, c in self._terms.items()]
        return self._lowered[key]

    def eval(self, t):
        """Value at ``t`` in ambient precision."""
        t = mp.mpf(t)
        total = mp.zero
        for r, c in self._lowered_terms():
            total += c if r == 0 else c * mp.exp(-r * t)
        return total

    def value_at_zero(self):
        return mp.fsum(self._terms.values())

    def eval_float(self, t) -> np.ndarray:
        """Double-precision evaluation on an array of times."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for r, c in self._terms.items():
            out += float(c) * np.exp(-float(r) * t)
        return out

    # -- serialization ---------------------------------------------------
    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda rc: (float(rc[0]), rc[0].rat, rc[0].pi_part))

    def to_json(self, digits: int | None = None) -> dict:
        digits = digits or mp.dps
        return {"terms": [{"rate": r.to_json(), "coeff": _coeff_to_str(c, digits + 5)}
                          for r, c in self.sorted_items()]}

    @classmethod
    def from_json(cls, obj: dict) -> ExpSum:
        return cls([(PiRational.from_json(t["rate"]), mp.mpf(t["coeff"])) for t in obj["terms"]])


def multiply(x: ExpSum, y: ExpSum) -> ExpSum:
    """All pairwise products; rates add exactly and like terms merge."""
    acc: Dict[PiRational, object] = {}
    for r1, c1 in x.items():
        for r2, c2 in y.items():
            key = r1 + r2
            prod = c1 * c2
            if key in acc:
                acc[key] += prod
            else:
                acc[key] = prod
    return ExpSum(acc)


def _positive_lowered(s: PiRational):
    with mp.extraprec(int(GUARD_DIGITS * 3.33) + 4):
        v = s.to_mpf()
        tiny = mp.mpf(2) ** (-mp.prec + 8)
    if abs(v) > tiny:
        sign = 1 if v > 0 else -1
    else:
        sign = s.sign()
    return sign, v


def integrate_shifted(x: ExpSum, shift: PiRational) -> ExpSum:
    """``int_0^t exp(-shift s) x(s) ds`` in closed form.

    Each term ``c exp(-r s)`` contributes ``c/(r+shift) (1 - exp(-(r+shift) t))``.
    The rate is lowered with guard digits before the division.
    """
    const = []
    out = []
    for r, c in x.items():
        s = r + shift
        if s.is_zero():
            raise ResonantRate(f"rate {r} + shift {shift} vanishes")
        sign, val = _positive_lowered(s)
        if sign < 0:
            raise ValueError(f"shifted rate {s} is negative; integral would grow")
        ratio = c / val
        const.append(ratio)
        out.append((s, -ratio))
    if not out:
        return ExpSum()
    return ExpSum([(ZERO, mp.fsum(const))] + out)


def eval_sum(x: ExpSum, t):
    return x.eval(t)


def stats(x: ExpSum, t_max: float = 50.0, points: int = 2001) -> Tuple[int, float]:
    """Term count and a grid estimate of ``sup_t |x(t)|`` on ``[0, t_max]``."""
    if not x:
        return 0, 0.0
    grid = np.linspace(0.0, t_max, points)
    return len(x), float(np.max(np.abs(x.eval_float(grid))))
