"""Exact numbers of the form ``a + b*pi`` with rational ``a`` and ``b``.

All closed-form eigenvalue integrals for the ``sin^-2`` angular kernel live in
this field, so arithmetic on them can be done without rounding.  Numerical
lowering goes through :mod:`mpmath` with round-to-nearest-even.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import mpmath
from mpmath import mp

Rational = Union[int, Fraction]


def _frac_to_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _parse_frac(s: str) -> Fraction:
    if not isinstance(s, str) or "." in s or "e" in s.lower():
        raise ValueError(f"not an exact rational string: {s!r}")
    return Fraction(s)


@dataclass(frozen=True, slots=True)
class PiRational:
    """Exact value ``rat + pi_part * pi``.

    ``Fraction`` keeps both parts in lowest terms with positive denominator,
    and since pi is transcendental the pair is a unique representation, so
    equality and hashing are componentwise.
    """

    rat: Fraction = Fraction(0)
    pi_part: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "rat", Fraction(self.rat))
        object.__setattr__(self, "pi_part", Fraction(self.pi_part))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: PiRational) -> PiRational:
        if not isinstance(other, PiRational):
            return NotImplemented
        return PiRational(self.rat + other.rat, self.pi_part + other.pi_part)

    def __sub__(self, other: PiRational) -> PiRational:
        if not isinstance(other, PiRational):
            return NotImplemented
        return PiRational(self.rat - other.rat, self.pi_part - other.pi_part)

    def __neg__(self) -> PiRational:
        return PiRational(-self.rat, -self.pi_part)

    def __mul__(self, q: Rational) -> PiRational:
        # products of two PiRationals would need pi^2, which is out of the field
        if isinstance(q, PiRational) or not isinstance(q, (int, Fraction)):
            return NotImplemented
        return PiRational(self.rat * q, self.pi_part * q)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.rat == 0 and self.pi_part == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- ordering ---------------------------------------------------------
    def sign(self) -> int:
        """Exact sign, decided by interval lowering at escalating precision."""
        if self.is_zero():
            return 0
        if self.pi_part == 0:
            return (self.rat > 0) - (self.rat < 0)
        if self.rat == 0:
            return (self.pi_part > 0) - (self.pi_part < 0)
        if (self.rat > 0) == (self.pi_part > 0):
            return 1 if self.rat > 0 else -1
        iv = mpmath.iv
        saved = iv.prec
        prec = 64
        try:
            while True:
                iv.prec = prec
                a = iv.mpf(self.rat.numerator) / self.rat.denominator
                b = iv.mpf(self.pi_part.numerator) / self.pi_part.denominator
                x = a + b * iv.pi
                if x.a > 0:
                    return 1
                if x.b < 0:
                    return -1
                prec *= 2
        finally:
            iv.prec = saved

    def __lt__(self, other: PiRational) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: PiRational) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other: PiRational) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other: PiRational) -> bool:
        return (self - other).sign() >= 0

    # -- lowering ---------------------------------------------------------
    def _lower(self, extra: int):
        with mp.extraprec(extra):
            a = mp.mpf(self.rat.numerator) / self.rat.denominator
            b = mp.mpf(self.pi_part.numerator) / self.pi_part.denominator * mp.pi
            return a, b, a + b

    def to_mpf(self) -> mpmath.mpf:
        """Value at the ambient mpmath precision.

        The two parts can cancel to many bits (``int sin^300`` is about
        ``2^-150`` from parts of order one), so the guard is widened until it
        covers the observed cancellation.
        """
        if self.pi_part == 0 or self.rat == 0:
            return +self._lower(20)[2]
        extra = 20
        while True:
            a, b, v = self._lower(extra)
            lost = max(mp.mag(a), mp.mag(b)) - (mp.mag(v) if v else -mp.prec - extra)
            if lost + 20 <= extra:
                return +v
            extra = lost + 40

    def __float__(self) -> float:
        with mp.workdps(20):
            return float(self.to_mpf())

    def __repr__(self) -> str:
        return f"PiRational({self.rat}, {self.pi_part})"

    def __str__(self) -> str:
        return f"{self.rat} + {self.pi_part}*pi"

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {"rat": _frac_to_str(self.rat), "pi": _frac_to_str(self.pi_part)}

    @classmethod
    def from_json(cls, obj: dict) -> PiRational:
        return cls(_parse_frac(obj["rat"]), _parse_frac(obj["pi"]))


ZERO = PiRational()
PI = PiRational(0, 1)


def add(x: PiRational, y: PiRational) -> PiRational:
    return x + y


def mul_rational(x: PiRational, q: Rational) -> PiRational:
    return x * Fraction(q)


def to_float(x: PiRational, digits: int) -> mpmath.mpf:
    """Round ``x`` to ``digits`` significant decimal digits (nearest-even).

    The value is formed with ten guard digits and then rounded once to the
    target precision, so the result is deterministic for a given ``digits``.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    with mp.workdps(digits + 10):
        v = x.to_mpf()
    with mp.workdps(digits):
        return +v


@dataclass(frozen=True, slots=True)
class SqrtRationalFactor:
    """Exact ``sqrt(radicand)`` with a nonnegative rational radicand."""

    radicand: Fraction

    def __post_init__(self):
        r = Fraction(self.radicand)
        if r < 0:
            raise ValueError("radicand must be nonnegative")
        object.__setattr__(self, "radicand", r)

    def to_mpf(self) -> mpmath.mpf:
        with mp.extraprec(20):
            v = mp.sqrt(mp.mpf(self.radicand.numerator) / self.radicand.denominator)
        return +v

    def to_float(self, digits: int) -> mpmath.mpf:
        with mp.workdps(digits + 10):
            v = self.to_mpf()
        with mp.workdps(digits):
            return +v


@lru_cache(maxsize=None)
def _cos_power_integral(b: int) -> PiRational:
    # I(0, b) = 2^-b / (2b) + (2b-1)/(2b) I(0, b-1),  I(0, 0) = pi/4
    val = PiRational(0, Fraction(1, 4))
    for k in range(1, b + 1):
        val = PiRational(Fraction(1, 2**k * 2 * k), 0) + val * Fraction(2 * k - 1, 2 * k)
    return val


@lru_cache(maxsize=None)
def trig_power_integral(a: int, b: int) -> PiRational:
    """Exact ``int_0^{pi/4} sin^(2a)(t) cos^(2b)(t) dt``.

    Reduces the sine exponent to zero with

        I(a, b) = -2^-(a+b) / (2a+2b) + (2a-1)/(2a+2b) * I(a-1, b)

    and then the cosine exponent with the analogous rule.  Boundary terms at
    pi/4 are rational because sin^2 = cos^2 = 1/2 there.
    """
    if a < 0 or b < 0:
        raise ValueError("exponents must be nonnegative")
    val = _cos_power_integral(b)
    for k in range(1, a + 1):
        m = k + b
        val = PiRational(Fraction(-1, 2**m * 2 * m), 0) + val * Fraction(2 * k - 1, 2 * m)
    return val
