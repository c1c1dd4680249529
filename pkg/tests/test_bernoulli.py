import math
from fractions import Fraction

import pytest

from emk.algebra import Polynomial, frac_part
from emk.bernoulli import bernoulli, bernoulli_number, bernoulli_value, todd_series
from emk.errors import ValidationError

s = Polynomial.variable(1, 0)


def test_low_order_polynomials():
    assert bernoulli(1) == (Fraction(-1, 2), s - Fraction(1, 2))
    assert bernoulli(2) == (Fraction(1, 6), s * s - s + Fraction(1, 6))
    b3, poly3 = bernoulli(3)
    assert b3 == 0
    assert poly3 == s**3 - (s * s).scale(Fraction(3, 2)) + s.scale(Fraction(1, 2))


@pytest.mark.parametrize("n", range(1, 15))
def test_recursion(n):
    assert sum(math.comb(n + 1, k) * bernoulli_number(k) for k in range(n + 1)) == 0


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11])
def test_odd_numbers_vanish(n):
    assert bernoulli_number(n) == 0


def test_known_numbers():
    assert bernoulli_number(4) == Fraction(-1, 30)
    assert bernoulli_number(6) == Fraction(1, 42)
    assert bernoulli_number(12) == Fraction(-691, 2730)


@pytest.mark.parametrize("n", range(1, 8))
def test_difference_identity(n):
    # B_n(x + 1) − B_n(x) = n x^{n−1}
    for x in (Fraction(0), Fraction(1, 3), Fraction(-5, 7)):
        assert bernoulli_value(n, x + 1) - bernoulli_value(n, x) == n * x ** (n - 1)


def test_values_match_polynomials():
    for n in range(6):
        _, poly = bernoulli(n)
        for x in (Fraction(1, 4), Fraction(2, 3)):
            assert bernoulli_value(n, x) == poly.evaluate((x,))


def test_periodic_values():
    x = Fraction(7, 5)
    assert bernoulli_value(2, frac_part(x)) == bernoulli_value(2, frac_part(x + 3))


def test_todd_series():
    z = Polynomial.linear([1, 2])
    expected = 1 - z.scale(Fraction(1, 2)) + (z * z).scale(Fraction(1, 12)) - (z**4).scale(Fraction(1, 720))
    assert todd_series((1, 2), 4) == expected


def test_negative_order_raises():
    with pytest.raises(ValidationError):
        bernoulli(-1)
