"""Exact complex rational arithmetic for section coefficients."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

__all__ = ["Scalar", "ZERO", "ONE", "I"]


@dataclass(frozen=True)
class Scalar:
    """a + b.i with exact rational a, b."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(re, im=0) -> "Scalar":
        return Scalar(Fraction(re), Fraction(im))

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

    def __truediv__(self, other: "Scalar") -> "Scalar":
        d = other.abs2()
        if d == 0:
            raise ZeroDivisionError("division by the zero scalar")
        conj = other.conj()
        num = self * conj
        return Scalar(num.re / d, num.im / d)

    def conj(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    @staticmethod
    def parse(text: str) -> "Scalar":
        """Parse "p/q", "p/q+r/s i", "i", "-2/3i" and friends."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty scalar")
        terms = re.findall(r"[+-]?[^+-]+", s)
        if not terms or "".join(terms) != s:
            raise ValueError(f"bad scalar syntax: {text!r}")
        re_part, im_part = Fraction(0), Fraction(0)
        seen_re = seen_im = False
        for term in terms:
            if term.endswith("i"):
                if seen_im:
                    raise ValueError(f"bad scalar syntax: {text!r}")
                seen_im = True
                body = term[:-1]
                if body in ("", "+"):
                    body = "1"
                elif body == "-":
                    body = "-1"
                im_part = Fraction(body)
            else:
                if seen_re:
                    raise ValueError(f"bad scalar syntax: {text!r}")
                seen_re = True
                re_part = Fraction(term)
        return Scalar(re_part, im_part)

    def render(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        imtxt = "i" if mag == 1 else f"{mag}i"
        return f"{self.re}{sign}{imtxt}"

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Scalar({self.render()})"


ZERO = Scalar.of(0)
ONE = Scalar.of(1)
I = Scalar.of(0, 1)
