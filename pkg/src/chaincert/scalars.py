"""Exact complex-rational scalars and their wire format.

Rationals serialize as "p/q" strings so certificates stay exact; complex
scalars are [re, im] pairs of those strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dyadic import CertifiedReal, frac_pow_enclosure


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Scalar:
    """Element of Q + iQ."""

    re: Fraction
    im: Fraction = Fraction(0)

    @staticmethod
    def of(re, im=0) -> "Scalar":
        return Scalar(Fraction(re), Fraction(im))

    @staticmethod
    def zero() -> "Scalar":
        return Scalar(Fraction(0), Fraction(0))

    @staticmethod
    def one() -> "Scalar":
        return Scalar(Fraction(1), Fraction(0))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __add__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __mul__(self, other: "Scalar") -> "Scalar":
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def mul_frac(self, c: Fraction) -> "Scalar":
        return Scalar(self.re * c, self.im * c)

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def abs_pow(self, p: Fraction, prec: int = 64) -> CertifiedReal:
        """|z|**p as a certified enclosure (exact when it lands rational)."""
        return frac_pow_enclosure(self.abs_sq(), p / 2, prec)

    def to_json(self) -> list[str]:
        return [format_rational(self.re), format_rational(self.im)]

    @staticmethod
    def from_json(obj) -> "Scalar":
        return Scalar(parse_rational(obj[0]), parse_rational(obj[1]))

    def __str__(self) -> str:
        if self.im == 0:
            return format_rational(self.re)
        return f"{format_rational(self.re)}+{format_rational(self.im)}i"
