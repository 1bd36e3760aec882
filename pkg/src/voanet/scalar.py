"""Exact complex-rational scalars.

Most of the package works with :class:`fractions.Fraction` directly; a
:class:`Scalar` only appears once an imaginary part is actually needed
(trigonometric test functions with complex coefficients, adjoints of such
operators).  Both types mix freely in arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

Exact = Union[int, Fraction, "Scalar"]


class Scalar:
    """A Gaussian rational ``re + im*i`` with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, Scalar):
            re, im = re.re, re.im + Fraction(im)
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @staticmethod
    def _coerce(other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Rational)):
            return Scalar(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("Scalar division by zero")
        num = self * o.conjugate()
        return Scalar(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __pos__(self):
        return self

    def __abs__(self):
        return abs(complex(self))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return Scalar(self.re, -self.im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


I = Scalar(0, 1)


def conj(x):
    """Complex conjugate of an exact or floating number."""
    if isinstance(x, (int, Fraction)):
        return x
    return x.conjugate()


def simplify(x):
    """Collapse a Scalar with zero imaginary part to a Fraction."""
    if isinstance(x, Scalar) and x.im == 0:
        return x.re
    return x


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, Scalar))


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Serialize as ``"p/q"`` or ``"p/q+r/s i"``."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return _frac_str(x)
    if not isinstance(x, Scalar):
        raise TypeError(f"not an exact scalar: {x!r}")
    if x.im == 0:
        return _frac_str(x.re)
    sign = "-" if x.im < 0 else "+"
    return f"{_frac_str(x.re)}{sign}{_frac_str(abs(x.im))} i"


def parse_scalar(text: str):
    """Inverse of :func:`format_scalar`; also accepts plain integers.

    Returns a Fraction when the imaginary part is absent or zero.
    """
    if not isinstance(text, str):
        raise TypeError(f"scalar must be a string, got {type(text).__name__}")
    t = text.strip()
    try:
        if not t.endswith("i"):
            return Fraction(t)
        body = t[:-1].strip()
        k = max(body.rfind("+"), body.rfind("-"))
        if k > 0:
            re_txt, im_txt = body[:k], body[k:]
        else:
            re_txt, im_txt = "0", body
        im_txt = im_txt.replace(" ", "")
        if im_txt in ("", "+", "-"):
            im_txt += "1"
        return simplify(Scalar(Fraction(re_txt), Fraction(im_txt)))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"malformed exact scalar {text!r}") from None
