from fractions import Fraction

import pytest

from emk.hyperfrac import ScalarProduct
from emk.polyhedra import AffineCone, Cone, Polyhedron


def F(*args) -> Fraction:
    return Fraction(*args)


@pytest.fixture
def unit_triangle() -> Polyhedron:
    """conv{(0,0), (1,0), (0,1)}; inequality order (−1,0), (0,−1), (1,1)."""
    return Polyhedron(2, [((-1, 0), 0), ((0, -1), 0), ((1, 1), 1)])


@pytest.fixture
def triangle_prime() -> Polyhedron:
    """conv{(0,0), (2,0), (0,3)}; the slanted facet is 3x₁ + 2x₂ ≤ 6."""
    return Polyhedron(2, [((-1, 0), 0), ((0, -1), 0), ((3, 2), 6)])


@pytest.fixture
def unit_square() -> Polyhedron:
    return Polyhedron.from_generators(2, [(0, 0), (1, 0), (0, 1), (1, 1)])


@pytest.fixture
def trapezoid() -> Polyhedron:
    return Polyhedron.from_generators(2, [(0, 0), (2, 0), (1, 1), (0, 1)])


@pytest.fixture
def simplex3() -> Polyhedron:
    return Polyhedron.from_generators(3, [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])


@pytest.fixture
def quadrant() -> Polyhedron:
    return Polyhedron(2, [((-1, 0), 0), ((0, -1), 0)])


SQUARE_CONE_RAYS = [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)]


@pytest.fixture
def square_cone() -> AffineCone:
    """Cone over a square: generated by e₃ ± e₁, e₃ ± e₂."""
    return AffineCone((F(0), F(0), F(0)), Cone.from_generators(SQUARE_CONE_RAYS))


@pytest.fixture
def square_cone_polyhedron() -> Polyhedron:
    return Polyhedron.from_generators(3, [(0, 0, 0)], SQUARE_CONE_RAYS)


@pytest.fixture
def cone_e1_e1e2() -> AffineCone:
    return AffineCone((F(0), F(0)), Cone.from_generators([(1, 0), (1, 1)]))


@pytest.fixture
def q2() -> ScalarProduct:
    return ScalarProduct.identity(2)


@pytest.fixture
def q3() -> ScalarProduct:
    return ScalarProduct.identity(3)
