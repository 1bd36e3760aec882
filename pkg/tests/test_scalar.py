from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from voanet.scalar import I, Scalar, conj, format_scalar, parse_scalar

fractions = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)


def test_format_real_and_complex():
    assert format_scalar(Fraction(3, 4)) == "3/4"
    assert format_scalar(2) == "2/1"
    assert format_scalar(Scalar(Fraction(1, 2), Fraction(-3, 5))) == "1/2-3/5 i"
    assert format_scalar(Scalar(0, 1)) == "0/1+1/1 i"


@pytest.mark.parametrize("text, value", [
    ("5/3", Fraction(5, 3)),
    ("-2", Fraction(-2)),
    ("1/2+3/4 i", Scalar(Fraction(1, 2), Fraction(3, 4))),
    ("1/2-i", Scalar(Fraction(1, 2), -1)),
    ("-i", Scalar(0, -1)),
    ("5 i", Scalar(0, 5)),
    ("0.5", Fraction(1, 2)),  # decimal strings are exact
])
def test_parse(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("bad", ["", "1/0x", "abc", "1/2+", "1/2 j"])
def test_parse_rejects_malformed(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_scalar(bad)


@given(fractions, fractions)
def test_round_trip(re, im):
    z = Scalar(re, im)
    back = parse_scalar(format_scalar(z))
    assert back == z
    if im == 0:
        assert isinstance(back, Fraction)


@given(fractions, fractions, fractions, fractions)
def test_arithmetic_matches_complex(a, b, c, d):
    x, y = Scalar(a, b), Scalar(c, d)
    zx, zy = complex(float(a), float(b)), complex(float(c), float(d))
    assert complex(x + y) == pytest.approx(zx + zy)
    assert complex(x * y) == pytest.approx(zx * zy, rel=1e-12, abs=1e-9)
    assert conj(x) == Scalar(a, -b)
    if y != 0:
        assert (x / y) * y == x


def test_unit_and_mixing_with_fractions():
    assert I * I == -1
    assert Fraction(1, 2) + I == Scalar(Fraction(1, 2), 1)
    assert (2 * I).conjugate() == -2 * I
