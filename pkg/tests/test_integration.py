from fractions import Fraction

import pytest

from emk.algebra import Polynomial, parse_polynomial
from emk.errors import ValidationError
from emk.integration import (
    face_integral,
    face_integral_numeric,
    simplex_integral,
    simplex_integral_numeric,
    standard_simplex_moment,
)

F = Fraction
one2 = Polynomial.one(2)
x1 = Polynomial.variable(2, 0)


def test_standard_simplex_moments():
    assert standard_simplex_moment((1, 1)) == F(1, 24)
    assert standard_simplex_moment((0, 0)) == F(1, 2)
    assert standard_simplex_moment((2,)) == F(1, 3)


def test_unit_triangle_integrals(unit_triangle):
    top = unit_triangle.faces[-1]
    assert face_integral(unit_triangle, top, one2) == F(1, 2)
    assert face_integral(unit_triangle, top, x1) == F(1, 6)


def test_edges_use_lattice_length(unit_triangle, triangle_prime):
    assert face_integral(unit_triangle, unit_triangle.face((2,)), one2) == 1
    assert face_integral(unit_triangle, unit_triangle.face((2,)), x1) == F(1, 2)
    assert face_integral(triangle_prime, triangle_prime.face((2,)), one2) == 1
    assert face_integral(triangle_prime, triangle_prime.face((1,)), one2) == 2


def test_vertex_integral_is_evaluation(unit_triangle):
    assert face_integral(unit_triangle, unit_triangle.face((1, 2)), x1 + 3) == 4


def test_triangle_prime_area(triangle_prime):
    assert face_integral(triangle_prime, triangle_prime.faces[-1], one2) == 3


def test_square_by_triangulation(unit_square):
    h = parse_polynomial("x1^2*x2 + x2", 2)
    assert face_integral(unit_square, unit_square.faces[-1], h) == F(1, 6) + F(1, 2)


def test_three_dimensional_simplex(simplex3):
    assert face_integral(simplex3, simplex3.faces[-1], Polynomial.one(3)) == F(1, 6)
    assert simplex_integral(Polynomial.variable(3, 2), [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]) == F(1, 24)


def test_unbounded_face_raises(quadrant):
    with pytest.raises(ValidationError):
        face_integral(quadrant, quadrant.faces[-1], one2)


def test_numeric_simplex_integral():
    value = simplex_integral_numeric(lambda x: x[0], [(0, 0), (1, 0), (0, 1)])
    assert value == pytest.approx(1 / 6, abs=1e-9)


def test_numeric_matches_exact(triangle_prime):
    h = parse_polynomial("x1*x2^2 - 2*x1 + 1", 2)
    exact = face_integral(triangle_prime, triangle_prime.faces[-1], h)
    numeric = face_integral_numeric(triangle_prime, triangle_prime.faces[-1], h.evaluate_float, ((0, 0), (5, 5)))
    assert numeric == pytest.approx(float(exact), abs=1e-8)


def test_numeric_integral_over_clipped_unbounded_faces(quadrant):
    top = quadrant.faces[-1]
    assert face_integral_numeric(quadrant, top, lambda x: 1.0, ((0, 0), (2, 3))) == pytest.approx(6.0)
    edge = quadrant.face((1,))
    assert face_integral_numeric(quadrant, edge, lambda x: 1.0, ((0, 0), (2, 3))) == pytest.approx(2.0)
    assert face_integral_numeric(quadrant, edge, lambda x: 1.0, ((-3, -3), (-1, -1))) == 0.0
