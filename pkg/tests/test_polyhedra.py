from collections import Counter
from fractions import Fraction
from itertools import product

import pytest

from emk.errors import ValidationError
from emk.hyperfrac import ScalarProduct
from emk.linalg import coordinates
from emk.polyhedra import (
    AffineCone,
    Cone,
    Polyhedron,
    fundamental_points,
    lineality_and_project,
    simplicial_subdivision,
    supporting_cone,
    transverse_cone,
    triangulate_face,
    unimodular_subdivision,
)


def in_half_open(cone: Cone, marks, x) -> bool:
    lam = coordinates(list(cone.generators), x)
    if lam is None:
        return False
    return all(c > 0 if j in marks else c >= 0 for j, c in enumerate(lam))


def assert_tiles(pieces, inside, box):
    for x in product(*(range(lo, hi + 1) for lo, hi in box)):
        hits = sum(in_half_open(piece, marks, x) for piece, marks in pieces)
        assert hits == (1 if inside(x) else 0), x


# ── Polyhedra and faces ──────────────────────────────
def test_inequalities_are_sorted_and_primitive():
    p = Polyhedron(2, [((2, 2), 2), ((0, -3), 0), ((-1, 0), 0), ((1, 1), 5)])
    assert p.inequalities == (((-1, 0), 0), ((0, -1), 0), ((1, 1), 1))


def test_unit_triangle_vertices_and_faces(unit_triangle):
    assert unit_triangle.vertices == ((0, 0), (0, 1), (1, 0))
    dims = Counter(f.dim for f in unit_triangle.faces)
    assert dims == {0: 3, 1: 3, 2: 1}
    assert unit_triangle.is_bounded and unit_triangle.is_lattice


def test_half_plane_has_two_faces():
    p = Polyhedron(2, [((-1, 0), 0)])
    assert len(p.faces) == 2
    assert p.lineality == ((0, 1),)
    assert not p.is_pointed


def test_square_cone_face_lattice(square_cone_polyhedron):
    p = square_cone_polyhedron
    assert len(p.faces) == 10
    assert Counter(f.dim for f in p.faces) == {0: 1, 1: 4, 2: 4, 3: 1}
    assert set(p.rays) == {(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)}


def test_from_generators_matches_inequalities(unit_triangle):
    q = Polyhedron.from_generators(2, [(0, 0), (1, 0), (0, 1)])
    assert q.inequalities == unit_triangle.inequalities


def test_from_generators_orients_every_facet_outwards():
    p = Polyhedron.from_generators(2, [(0, 3), (1, 1), (2, 0), (0, 0)])
    assert p.inequalities == Polyhedron(2, [((-1, 0), 0), ((0, -1), 0), ((3, 2), 6)]).inequalities
    assert all(p.contains(v) for v in [(0, 3), (1, 1), (2, 0), (0, 0)])
    assert not p.contains((2, 1))


def test_lower_dimensional_polytope():
    segment = Polyhedron.from_generators(2, [(0, 0), (2, 1)])
    assert segment.dimension == 1
    assert len(segment.faces) == 3


def test_empty_polyhedron_raises():
    with pytest.raises(ValidationError):
        Polyhedron(1, [((1,), 0), ((-1,), -1)])


def test_dimension_mismatch_raises():
    with pytest.raises(ValidationError):
        Polyhedron(2, [((1, 0, 0), 1)])


def test_lattice_points_and_dilation(unit_triangle, triangle_prime):
    assert len(unit_triangle.lattice_points(2)) == 6
    assert len(triangle_prime.lattice_points(1)) == 7
    assert len(unit_triangle.lattice_points(Fraction(1, 2))) == 1
    assert unit_triangle.dilate(3).vertices == ((0, 0), (0, 3), (3, 0))


def test_rational_polytope_is_not_lattice():
    p = Polyhedron.from_generators(2, [(0, 0), (Fraction(1, 2), 0), (0, 1)])
    assert not p.is_lattice


def test_triangulation_of_square(unit_square):
    simplices = triangulate_face(unit_square, unit_square.faces[-1])
    assert len(simplices) == 2


# ── Supporting and transverse cones ──────────────────
def test_supporting_cone_at_vertex(unit_triangle):
    a = supporting_cone(unit_triangle, unit_triangle.face((0, 1)))
    assert set(a.cone.generators) == {(1, 0), (0, 1)}
    assert a.vertex == (0, 0)


def test_supporting_cone_of_edge_has_lineality(unit_triangle):
    a = supporting_cone(unit_triangle, unit_triangle.face((2,)))
    assert a.cone.generators == ((-1, -1),)
    assert len(a.cone.lineality) == 1


def test_supporting_cone_of_polytope_is_everything(unit_triangle):
    a = supporting_cone(unit_triangle, unit_triangle.face(()))
    assert a.cone.generators == ()
    assert len(a.cone.lineality) == 2


def test_transverse_cone_of_diagonal(unit_triangle):
    tc, quotient = transverse_cone(unit_triangle, unit_triangle.face((2,)))
    assert tc.cone.generators == ((Fraction(-1, 2), Fraction(-1, 2)),)
    assert tc.vertex == (Fraction(1, 2), Fraction(1, 2))
    assert quotient.mod_basis == ((1, -1),)


def test_transverse_cone_of_vertex(triangle_prime):
    tc, _ = transverse_cone(triangle_prime, triangle_prime.face((1, 2)))
    assert set(tc.cone.generators) == {(-1, 0), (-2, 3)}
    assert tc.vertex == (2, 0)
    assert tc.cone.index(tc.lattice) == 3


def test_transverse_cone_of_whole_polytope(unit_triangle):
    tc, _ = transverse_cone(unit_triangle, unit_triangle.face(()))
    assert tc.cone.generators == ()
    assert tc.vertex == (0, 0)


@pytest.mark.parametrize("fixture", ["unit_triangle", "triangle_prime", "simplex3"])
def test_facet_generator_is_scaled_inward_normal(fixture, request):
    p = request.getfixturevalue(fixture)
    for f in p.faces:
        if f.dim != p.dimension - 1:
            continue
        (i,) = f.key
        a, _ = p.inequalities[i]
        norm2 = sum(x * x for x in a)
        tc, _ = transverse_cone(p, f)
        assert tc.cone.generators == (tuple(Fraction(-x, norm2) for x in a),)


def test_square_cone_edges_are_index_two(square_cone_polyhedron):
    p = square_cone_polyhedron
    for f in p.faces:
        if f.dim == 1:
            tc, _ = transverse_cone(p, f)
            assert tc.cone.index(tc.lattice) == 2


def test_transverse_cone_with_scalar_product(unit_triangle):
    q = ScalarProduct.of([[2, 1], [1, 2]])
    tc, quotient = transverse_cone(unit_triangle, unit_triangle.face((1,)), q)
    (u,) = tc.cone.generators
    assert q(u, (1, 0)) == 0
    assert u[1] > 0


def test_lineality_and_project():
    p = Polyhedron(2, [((-1, 0), 0)])
    quotient, pointed = lineality_and_project(p)
    assert quotient.mod_basis == ((0, 1),)
    assert pointed.is_pointed
    assert pointed.dimension == 1
    assert pointed.rays == ((1, 0),)


def test_lineality_and_project_of_whole_space():
    quotient, pointed = lineality_and_project(Polyhedron(2, []))
    assert len(quotient.mod_basis) == 2
    assert pointed.dimension == 0


# ── Cones ────────────────────────────────────────────
def test_cone_from_generators_drops_interior_rays():
    cone = Cone.from_generators([(1, 0), (1, 1), (0, 2)])
    assert cone.generators == ((1, 0), (0, 1))
    assert cone.is_unimodular()


def test_cone_with_lineality():
    cone = Cone.from_generators([(1, 0)], 2, lineality=[(0, 1)])
    assert not cone.is_pointed
    assert cone.lineality


def test_affine_cone_dilate_and_translate(cone_e1_e1e2):
    a = cone_e1_e1e2.translate((1, 2)).dilate(Fraction(1, 2))
    assert a.vertex == (Fraction(1, 2), 1)
    with pytest.raises(ValidationError):
        a.dilate(0)


@pytest.mark.parametrize(
    "s, gens, marks, expected",
    [
        ((0, 0), [(1, 0), (1, 2)], (), {(0, 0), (1, 1)}),
        ((Fraction(1, 2), 0), [(1, 0), (0, 1)], (), {(1, 0)}),
        ((0, 0), [(1, 0), (0, 1)], (0,), {(1, 0)}),
        ((0, 0), [(1, 0), (0, 1)], (0, 1), {(1, 1)}),
    ],
)
def test_fundamental_points(s, gens, marks, expected):
    assert set(fundamental_points(s, gens, marks)) == expected


# ── Subdivisions ─────────────────────────────────────
def test_simplicial_cone_is_its_own_subdivision(cone_e1_e1e2):
    pieces = simplicial_subdivision(cone_e1_e1e2.cone)
    assert pieces == [(cone_e1_e1e2.cone, frozenset())]


def test_square_cone_simplicial_subdivision_tiles(square_cone):
    cone = square_cone.cone
    pieces = simplicial_subdivision(cone)
    assert len(pieces) == 2
    assert all(piece.is_simplicial for piece, _ in pieces)
    assert_tiles(pieces, cone.contains, [(-3, 3), (-3, 3), (0, 3)])


def test_pentagon_cone_subdivision_tiles():
    cone = Cone.from_generators([(1, 0, 1), (0, 1, 1), (-1, 1, 1), (-1, -1, 1), (1, -1, 1)])
    pieces = simplicial_subdivision(cone)
    assert len(pieces) == 3
    assert_tiles(pieces, cone.contains, [(-3, 3), (-3, 3), (0, 3)])


@pytest.mark.parametrize("gens, count", [([(1, 0), (1, 2)], 2), ([(1, 0), (1, 3)], 3)])
def test_unimodular_subdivision_tiles(gens, count):
    cone = Cone.from_generators(gens)
    pieces = unimodular_subdivision(cone)
    assert len(pieces) == count
    assert all(piece.is_unimodular() for piece, _ in pieces)
    assert_tiles(pieces, cone.contains, [(-2, 6), (-2, 12)])


def test_unimodular_subdivision_of_half_open_cone():
    cone = Cone.from_generators([(1, 0), (1, 3)])
    pieces = unimodular_subdivision(cone, open_marks=(0,))
    assert_tiles(pieces, lambda x: in_half_open(cone, {0}, x), [(-2, 6), (-2, 12)])


def test_unimodular_subdivision_three_dimensional():
    cone = Cone.from_generators([(1, 0, 0), (0, 1, 0), (1, 1, 2)])
    pieces = unimodular_subdivision(cone)
    assert all(piece.is_unimodular() for piece, _ in pieces)
    assert_tiles(pieces, cone.contains, [(-1, 4), (-1, 4), (-1, 6)])


def test_unimodular_cone_is_kept():
    cone = Cone.from_generators([(1, 0), (1, 1)])
    assert unimodular_subdivision(cone) == [(cone, frozenset())]
