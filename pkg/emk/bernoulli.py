"""
Bernoulli numbers and polynomials, and the Todd series z/(e^z − 1).

Numbers follow the convention b_1 = −1/2, computed from the recursion
Σ_{k=0}^{n} C(n+1, k) b_k = 0. Tables are cached per requested order.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from emk.algebra import Polynomial, Scalar, linear_power_sums
from emk.errors import ValidationError


@dataclass(frozen=True)
class BernoulliTable:
    max_order: int
    numbers: tuple[Fraction, ...]
    polynomials: tuple[Polynomial, ...]  # univariate, variable s


@lru_cache(maxsize=None)
def _numbers(n: int) -> tuple[Fraction, ...]:
    if n == 0:
        return (Fraction(1),)
    previous = _numbers(n - 1)
    b_n = -sum(
        (math.comb(n + 1, k) * b for k, b in enumerate(previous)), Fraction(0)
    ) / (n + 1)
    return previous + (b_n,)


@lru_cache(maxsize=None)
def bernoulli_table(max_order: int) -> BernoulliTable:
    if max_order < 0:
        raise ValidationError(f"Bernoulli order must be non-negative, got {max_order}")
    numbers = _numbers(max_order)
    polys = []
    for n in range(max_order + 1):
        terms = {(n - k,): math.comb(n, k) * numbers[k] for k in range(n + 1)}
        polys.append(Polynomial(1, terms))
    return BernoulliTable(max_order, numbers, tuple(polys))


def bernoulli(n: int) -> tuple[Fraction, Polynomial]:
    """Return (b_n, B_n(s))."""
    table = bernoulli_table(n)
    return table.numbers[n], table.polynomials[n]


def bernoulli_number(n: int) -> Fraction:
    return bernoulli_table(n).numbers[n]


def bernoulli_value(n: int, s: Scalar) -> Fraction:
    """B_n(s) = Σ C(n,k) b_k s^{n−k}."""
    numbers = bernoulli_table(n).numbers
    s = Fraction(s)
    return sum((math.comb(n, k) * numbers[k] * s ** (n - k) for k in range(n + 1)), Fraction(0))


def todd_series(v: Sequence[Scalar], depth: int) -> Polynomial:
    """Σ_{k≤depth} b_k/k! ⟨ξ,v⟩^k, the Taylor polynomial of z/(e^z − 1) at z = ⟨ξ,v⟩."""
    numbers = bernoulli_table(depth).numbers
    weights = [numbers[k] / math.factorial(k) for k in range(depth + 1)]
    return linear_power_sums(v, depth, weights)
