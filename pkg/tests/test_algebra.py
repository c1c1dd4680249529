import random
from fractions import Fraction

import pytest

from emk.algebra import (
    Polynomial,
    canonical_form,
    exp_series,
    format_rational,
    frac_part,
    monomials,
    parse_polynomial,
    parse_rational,
    poly_arith,
    primitive,
    restrict_to_subspace,
)
from emk.errors import ValidationError

x1 = Polynomial.variable(2, 0)
x2 = Polynomial.variable(2, 1)


def random_polynomial(rng: random.Random, dim: int, degree: int) -> Polynomial:
    terms = {}
    for d in range(degree + 1):
        for mono in monomials(dim, d):
            if rng.random() < 0.5:
                terms[mono] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return Polynomial(dim, terms)


@pytest.mark.parametrize(
    "value, expected",
    [(Fraction(7, 3), Fraction(1, 3)), (Fraction(-1, 4), Fraction(3, 4)), (5, 0), (Fraction(-3), 0)],
)
def test_frac_part(value, expected):
    assert frac_part(value) == expected


@pytest.mark.parametrize("text, expected", [("3/4", Fraction(3, 4)), ("-2", Fraction(-2)), (" 5 / 10 ", Fraction(1, 2))])
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("text", ["1/0", "x", "1.5", ""])
def test_parse_rational_rejects(text):
    with pytest.raises(ValidationError):
        parse_rational(text)


def test_format_rational():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-3, 6)) == "-1/2"


def test_poly_arith_add():
    assert poly_arith(x1 + 1, x2, "add") == x1 + x2 + 1


def test_poly_arith_mul():
    assert poly_arith(x1 + 1, x1 - 1, "mul") == x1 * x1 - 1


def test_poly_arith_scale():
    assert poly_arith(x1 + x2, Fraction(1, 2), "scale") == Polynomial.linear([Fraction(1, 2), Fraction(1, 2)])


def test_poly_arith_unknown_operation():
    with pytest.raises(ValidationError):
        poly_arith(x1, x2, "div")


def test_dimension_mismatch_raises():
    with pytest.raises(ValidationError):
        x1 + Polynomial.variable(3, 0)


@pytest.mark.parametrize(
    "p, basis, expected",
    [
        (x1 + x2, [(1, -1)], Polynomial.zero(1)),
        (x1 * x1, [(1, 0)], Polynomial(1, {(2,): 1})),
        (x1 * x2, [(1, 1)], Polynomial(1, {(2,): 1})),
    ],
)
def test_restrict_to_subspace(p, basis, expected):
    assert restrict_to_subspace(p, basis) == expected


def test_restrict_to_dependent_basis_raises():
    with pytest.raises(ValidationError):
        restrict_to_subspace(x1, [(1, 1), (2, 2)])


def test_parse_polynomial():
    p = parse_polynomial("x1^2*x2 - 1/2*x1 + 3", 2)
    assert p == x1 * x1 * x2 - x1.scale(Fraction(1, 2)) + 3
    assert parse_polynomial("one", 3) == Polynomial.one(3)


def test_parse_polynomial_operator_variables():
    assert parse_polynomial("1/24*d1 + 1/24*d2", 2, "d") == Polynomial.linear([Fraction(1, 24), Fraction(1, 24)])


@pytest.mark.parametrize("text", ["x3", "x1^", "2**x1", "x1 + + x2", "y1"])
def test_parse_polynomial_rejects(text):
    with pytest.raises(ValidationError):
        parse_polynomial(text, 2)


def test_format():
    assert (x1 * x1 * x2 - x1.scale(Fraction(1, 2)) + 3).format() == "x1^2*x2 - 1/2*x1 + 3"
    assert Polynomial.linear([Fraction(-1, 12), 0]).format("d") == "-1/12*d1"
    assert Polynomial.zero(2).format() == "0"


def test_format_parses_back():
    rng = random.Random(3)
    for _ in range(10):
        p = random_polynomial(rng, 3, 3)
        assert parse_polynomial(p.format(), 3) == p


def test_ring_axioms():
    rng = random.Random(11)
    for _ in range(20):
        a, b, c = (random_polynomial(rng, 2, 2) for _ in range(3))
        assert a + b == b + a
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == Polynomial.zero(2)


def test_evaluate_and_derivatives():
    p = x1**3 * x2 + x2
    assert p.evaluate((2, Fraction(1, 2))) == Fraction(9, 2)
    assert p.diff(0) == (x1 * x1 * x2).scale(3)
    assert p.derivative((2, 1)) == x1.scale(6)
    assert p.antiderivative(1).diff(1) == p


def test_apply_as_operator():
    h = x1 * x1 * x2
    operator = Polynomial.linear([1, 1])
    assert operator.apply_as_operator(h) == (x1 * x2).scale(2) + x1 * x1


def test_compose_linear():
    # ξ = M η with M = [[1, 1], [0, 1]]
    assert (x1 * x2).compose_linear([[1, 1], [0, 1]]) == x1 * x2 + x2 * x2


def test_homogeneous_parts():
    p = 1 + x1 + x1 * x2
    assert p.homogeneous_parts(3) == (Polynomial.one(2), x1, x1 * x2, Polynomial.zero(2))
    assert p.truncate(1) == 1 + x1
    assert not p.is_homogeneous()
    assert (x1 * x2).is_homogeneous(2)


def test_exp_series():
    e = exp_series((1, 2), 2)
    form = x1 + x2.scale(2)
    assert e == 1 + form + (form * form).scale(Fraction(1, 2))


def test_primitive_and_canonical_form():
    assert primitive((Fraction(1, 2), Fraction(-1, 3))) == ((3, -2), Fraction(1, 6))
    assert canonical_form((-2, 4)) == ((1, -2), Fraction(-2))
    with pytest.raises(ValidationError):
        primitive((0, 0))
