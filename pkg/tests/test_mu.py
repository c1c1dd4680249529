import math
import random
from fractions import Fraction

import pytest

from emk.algebra import Polynomial, frac_part
from emk.bernoulli import bernoulli_value
from emk.errors import ValidationError
from emk.genfun import simplicial_germ
from emk.hyperfrac import HyperFraction, ScalarProduct, renormalize_germ
from emk.linalg import rank
from emk.mu import local_eml, mu, mu_at_dilation, mu_embedded, mu_simplicial_direct, mu_transverse
from emk.polyhedra import AffineCone, Cone, simplicial_subdivision

F = Fraction
x1 = Polynomial.variable(2, 0)
x2 = Polynomial.variable(2, 1)


def affine(vertex, gens, dim=None) -> AffineCone:
    return AffineCone(tuple(F(x) for x in vertex), Cone.from_generators(gens, dim))


def hf(numerator: Polynomial, *poles) -> HyperFraction:
    return HyperFraction.build(numerator, [(v, 1) for v in poles])


def test_mu_of_half_line():
    xi = Polynomial.variable(1, 0)
    result = mu(affine((0,), [(1,)]), order=2)
    assert result.components == (Polynomial.constant(1, F(1, 2)), xi.scale(F(-1, 12)), Polynomial.zero(1))


@pytest.mark.parametrize("s", [F(0), F(1, 3), F(-2, 5), F(7, 4), F(3)])
def test_mu_of_shifted_half_line(s):
    xi = Polynomial.variable(1, 0)
    result = mu(affine((s,), [(1,)]), order=3)
    for m in range(4):
        coefficient = -bernoulli_value(m + 1, frac_part(-s)) / math.factorial(m + 1)
        assert result.component(m) == (xi**m).scale(coefficient)


def test_mu_of_a_point():
    point = AffineCone((F(0), F(0)), Cone(2, ()))
    assert mu(point, order=2).components == (Polynomial.one(2), Polynomial.zero(2), Polynomial.zero(2))
    off_lattice = AffineCone((F(1, 2), F(0)), Cone(2, ()))
    assert all(p.is_zero for p in mu(off_lattice, order=1).components)


def test_mu_of_unimodular_cone(cone_e1_e1e2):
    assert mu(cone_e1_e1e2, order=0).component(0) == F(3, 8)


def test_mu_of_square_cone_apex(square_cone):
    assert mu(square_cone, order=0).component(0) == F(1, 6)


def test_mu_of_half_line_in_the_plane():
    a = affine((F(1, 3), 1), [(1, 0)])
    result = mu(a, order=1)
    assert result.component(0) == F(-1, 6)
    assert result.component(1) == x1.scale(F(1, 36))
    assert all(p.is_zero for p in mu(affine((F(1, 3), F(1, 2)), [(1, 0)]), order=1).components)


def test_mu_embedded_quotients_the_lineality():
    a = AffineCone((F(0), F(0)), Cone.from_generators([(1, 0)], 2, lineality=[(0, 1)]))
    result = mu_embedded(a, order=2)
    assert result.components == (Polynomial.constant(2, F(1, 2)), x1.scale(F(-1, 12)), Polynomial.zero(2))
    with pytest.raises(ValidationError):
        mu(a)


def test_mu_transverse_is_invariant_along_the_face(unit_triangle):
    diagonal = unit_triangle.face((2,))
    result = mu_transverse(unit_triangle, diagonal, order=3)
    assert result.is_invariant_under((1, -1))
    assert result.component(0) == F(1, 2)
    assert result.component(1) == (x1 + x2).scale(F(1, 24))


def test_half_line_is_not_translation_invariant():
    assert not mu(affine((0,), [(1,)]), order=1).is_invariant_under((1,))


def test_mu_at_dilation():
    tc = affine((F(1, 3),), [(1,)])
    assert mu_at_dilation(tc, 3).components == mu(affine((1,), [(1,)])).components
    assert mu_at_dilation(tc, F(3, 2)).component(0) == F(1, 2) - frac_part(F(-1, 2))
    with pytest.raises(ValidationError):
        mu_at_dilation(tc, 0)


@pytest.mark.parametrize("shift", [(1, 0), (2, -1), (-3, 5)])
def test_mu_is_lattice_shift_invariant(shift):
    a = affine((F(1, 2), F(1, 3)), [(1, 0), (1, 2)])
    assert mu(a.translate(shift), order=3).components == mu(a, order=3).components


def test_mu_depends_on_scalar_product(cone_e1_e1e2):
    standard = mu(cone_e1_e1e2, order=1)
    skew = mu(cone_e1_e1e2, ScalarProduct.of([[2, 1], [1, 2]]), order=1)
    assert standard.component(0) == F(3, 8)
    assert skew.component(0) == F(5, 12)


def test_negative_order_and_bad_scalar_product(cone_e1_e1e2):
    with pytest.raises(ValidationError):
        mu(cone_e1_e1e2, order=-1)
    with pytest.raises(ValidationError):
        mu(cone_e1_e1e2, ScalarProduct.identity(3))


@pytest.mark.parametrize(
    "vertex, gens",
    [
        ((0, 0), [(1, 0), (1, 1)]),
        ((0, 0), [(1, 0), (1, 3)]),
        ((F(1, 2), F(1, 3)), [(1, 0), (1, 2)]),
        ((0, 0, 0), [(1, 0, 0), (0, 1, 0), (1, 1, 2)]),
        ((F(1, 2), 0, F(2, 3)), [(1, 0, 1), (0, 1, 1), (-1, -1, 1)]),
    ],
)
@pytest.mark.parametrize("q", [None, "skew"])
def test_direct_decomposition_agrees(vertex, gens, q):
    a = affine(vertex, gens)
    sp = None
    if q == "skew":
        sp = ScalarProduct.of([[2 if i == j else (1 if abs(i - j) == 1 else 0) for j in range(a.dim)] for i in range(a.dim)])
    assert mu_simplicial_direct(a, sp, order=3) == mu(a, sp, order=3).components


def test_mu_of_pieces_adds_up(square_cone, q3):
    total = [Polynomial.zero(3) for _ in range(3)]
    for piece, marks in simplicial_subdivision(square_cone.cone):
        germ = simplicial_germ(square_cone.vertex, piece.generators, 2, marks)
        for m, p in enumerate(renormalize_germ(germ, q3, 2)):
            total[m] = total[m] + p
    assert tuple(total) == mu(square_cone, q3, order=2).components


# ── Local Euler–Maclaurin decomposition ──────────────
def test_local_eml_of_unimodular_cone(cone_e1_e1e2):
    decomposition = local_eml(cone_e1_e1e2, order=2)
    expected = (
        HyperFraction.polynomial(Polynomial.constant(2, F(3, 8)))
        + hf(x2.scale(F(1, 12)), (1, 0))
        + hf((x1 - x2).scale(F(1, 24)), (1, 1))
    )
    assert decomposition.component(0) == expected
    assert decomposition.mismatches() == []


def test_local_eml_of_square_cone(square_cone):
    decomposition = local_eml(square_cone, order=3)
    assert len(decomposition.per_face) == 10
    assert decomposition.mismatches() == []


def test_local_eml_rejects_non_standard_lattice():
    a = AffineCone((F(0), F(0)), Cone.from_generators([(1, 0), (0, 1)]), ((2, 0), (0, 1)))
    with pytest.raises(ValidationError):
        local_eml(a)


def test_local_eml_rejects_non_pointed_cone():
    a = AffineCone((F(0), F(0)), Cone.from_generators([(1, 0)], 2, lineality=[(0, 1)]))
    with pytest.raises(ValidationError):
        local_eml(a)


def random_cone(rng: random.Random) -> AffineCone:
    while True:
        dim = rng.choice([2, 3])
        count = dim if dim == 2 else rng.randint(3, 4)
        gens = [tuple(rng.randint(-5, 5) for _ in range(dim - 1)) + (rng.randint(1, 5),) for _ in range(count)]
        if rank(gens) < dim:
            continue
        vertex = tuple(F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(dim))
        return AffineCone(vertex, Cone.from_generators(gens))


@pytest.mark.slow
def test_local_eml_on_random_cones():
    rng = random.Random(31)
    for _ in range(25):
        a = random_cone(rng)
        assert local_eml(a, order=3).mismatches() == [], a.to_json()
