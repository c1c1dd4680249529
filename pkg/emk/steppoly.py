"""
Step-polynomials in a dilation parameter t.

Expressions are trees over rational constants, sums, products and the atoms
{γt} (fractional part of γ·t, γ ∈ ℚ). Evaluation at rational t is exact.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction

from emk.algebra import Scalar, format_rational, frac_part
from emk.bernoulli import bernoulli_table


class StepPolynomialExpr(ABC):
    @abstractmethod
    def evaluate(self, t: Scalar) -> Fraction: ...

    @abstractmethod
    def format(self) -> str: ...

    def __add__(self, other: StepPolynomialExpr | Scalar) -> StepPolynomialExpr:
        return Sum((self, _lift(other)))

    def __radd__(self, other: Scalar) -> StepPolynomialExpr:
        return Sum((_lift(other), self))

    def __neg__(self) -> StepPolynomialExpr:
        return Product((Const(Fraction(-1)), self))

    def __sub__(self, other: StepPolynomialExpr | Scalar) -> StepPolynomialExpr:
        return self + (-_lift(other))

    def __rsub__(self, other: Scalar) -> StepPolynomialExpr:
        return _lift(other) + (-self)

    def __mul__(self, other: StepPolynomialExpr | Scalar) -> StepPolynomialExpr:
        return Product((self, _lift(other)))

    def __rmul__(self, other: Scalar) -> StepPolynomialExpr:
        return Product((_lift(other), self))

    def __pow__(self, exponent: int) -> StepPolynomialExpr:
        if exponent == 0:
            return Const(Fraction(1))
        return Product(tuple(self for _ in range(exponent)))

    def __str__(self) -> str:
        return self.format()


def _lift(x: StepPolynomialExpr | Scalar) -> StepPolynomialExpr:
    return x if isinstance(x, StepPolynomialExpr) else Const(Fraction(x))


@dataclass(frozen=True)
class Const(StepPolynomialExpr):
    value: Fraction

    def evaluate(self, t: Scalar) -> Fraction:
        return self.value

    def format(self) -> str:
        return format_rational(self.value)


@dataclass(frozen=True)
class FracAtom(StepPolynomialExpr):
    """{γt}"""

    gamma: Fraction

    def evaluate(self, t: Scalar) -> Fraction:
        return frac_part(self.gamma * Fraction(t))

    def format(self) -> str:
        if self.gamma == 1:
            return "{t}"
        if self.gamma == -1:
            return "{-t}"
        return f"{{{format_rational(self.gamma)}t}}"


@dataclass(frozen=True)
class Sum(StepPolynomialExpr):
    terms: tuple[StepPolynomialExpr, ...]

    def evaluate(self, t: Scalar) -> Fraction:
        return sum((e.evaluate(t) for e in self.terms), Fraction(0))

    def format(self) -> str:
        return " + ".join(e.format() for e in self.terms) or "0"


@dataclass(frozen=True)
class Product(StepPolynomialExpr):
    factors: tuple[StepPolynomialExpr, ...]

    def evaluate(self, t: Scalar) -> Fraction:
        return math.prod((e.evaluate(t) for e in self.factors), start=Fraction(1))

    def format(self) -> str:
        parts = [f"({e.format()})" if isinstance(e, Sum) else e.format() for e in self.factors]
        return "*".join(parts) or "1"


def frac(gamma: Scalar = 1) -> FracAtom:
    return FracAtom(Fraction(gamma))


def step_poly_eval(e: StepPolynomialExpr, t: Scalar) -> Fraction:
    return e.evaluate(Fraction(t))


def bernoulli_step(n: int, gamma: Scalar) -> StepPolynomialExpr:
    """B_n({γt}) = Σ_k C(n,k) b_k {γt}^{n−k}."""
    numbers = bernoulli_table(n).numbers
    atom = frac(gamma)
    terms = [
        Const(math.comb(n, k) * numbers[k]) * atom ** (n - k)
        for k in range(n + 1)
        if numbers[k]
    ]
    return Sum(tuple(terms))
