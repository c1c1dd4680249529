"""
Exponential generating functions of affine cones.

For a simplicial affine cone s + cone(v_1..v_k) with lattice generators,

    S(ξ) = Σ_{x ∈ box} e^{⟨ξ,x⟩} ∏_j 1/(1 − e^{⟨ξ,v_j⟩})
         = (−1)^k Σ_{x ∈ box} e^{⟨ξ,x⟩} ∏_j Todd(⟨ξ,v_j⟩) / ∏_j ⟨ξ,v_j⟩,

so S is a ``MeromorphicGerm`` whose numerator is a finite sum of products of
truncated exponential and Todd series. Non-simplicial cones are cut into
half-open simplicial pieces whose germs are added over the common
denominator. The continuous analogue I(s + c) = (−1)^k e^{⟨ξ,s⟩} |det_Λ| / ∏⟨ξ,v_j⟩
is exact and kept as an ``IntegralTerm``: a HyperFraction with its
exponential shift stored on the side.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product

from loguru import logger

from emk.algebra import Polynomial, Scalar, Vector, exp_series, format_rational, primitive
from emk.bernoulli import todd_series
from emk.errors import ValidationError
from emk.hyperfrac import HyperFraction, MeromorphicGerm, perp_basis
from emk.linalg import coordinates, in_lattice, lattice_basis, lattice_index, lattice_point, mat_vec
from emk.polyhedra import AffineCone, Cone, fundamental_points, simplicial_subdivision
from emk.workers import parallel_map

IntVector = tuple[int, ...]
Lattice = Sequence[Sequence[Scalar]] | None


# ── Fundamental boxes ────────────────────────────────
@dataclass(frozen=True)
class BoxSum:
    """Lattice points of s + Σ_j I_j v_j, I_j = [0,1) or (0,1] on marked facets."""

    vertex: Vector
    generators: tuple[Vector, ...]
    points: tuple[Vector, ...]
    open_marks: frozenset[int] = field(default_factory=frozenset)

    def exponential_sum(self, depth: int) -> Polynomial:
        """Σ_x e^{⟨ξ,x⟩} truncated at total degree ``depth``."""
        dim = len(self.vertex)
        return sum((exp_series(x, depth) for x in self.points), Polynomial.zero(dim))

    def to_json(self) -> dict:
        return {
            "vertex": [format_rational(x) for x in self.vertex],
            "generators": [[format_rational(x) for x in g] for g in self.generators],
            "points": [[format_rational(x) for x in p] for p in self.points],
        }


def box_points(
    s: Sequence[Scalar], gens: Sequence[Sequence[Scalar]], open_marks: Iterable[int] = (), lattice: Lattice = None
) -> BoxSum:
    """Enumerate the half-open fundamental box of ``gens`` at ``s`` in Λ (ℤ^d by default)."""
    vertex = tuple(Fraction(x) for x in s)
    generators = tuple(tuple(Fraction(x) for x in g) for g in gens)
    marks = frozenset(open_marks)
    if lattice is None or not generators and not lattice:
        points = tuple(tuple(Fraction(x) for x in p) for p in fundamental_points(vertex, generators, marks))
        return BoxSum(vertex, generators, points, marks)
    if not generators:
        points = (vertex,) if in_lattice(lattice, vertex) else ()
        return BoxSum(vertex, generators, points, marks)
    local_vertex = coordinates(lattice, vertex)
    local_gens = [coordinates(lattice, g) for g in generators]
    if local_vertex is None or any(g is None for g in local_gens):
        raise ValidationError("Box data lies outside the span of the lattice")
    local = fundamental_points(local_vertex, local_gens, marks)
    points = tuple(lattice_point(lattice, p) for p in local)
    return BoxSum(vertex, generators, points, marks)


# ── Discrete generating function ─────────────────────
def simplicial_germ(
    vertex: Sequence[Scalar],
    gens: Sequence[Sequence[Scalar]],
    order: int,
    open_marks: Iterable[int] = (),
    lattice: Lattice = None,
) -> MeromorphicGerm:
    """S of a (half-open) simplicial affine cone, known through homogeneous degree ``order``."""
    dim = len(vertex)
    k = len(gens)
    if order < -k:
        raise ValidationError(f"Germ order {order} below the pole order {-k}")
    box = box_points(vertex, gens, open_marks, lattice)
    if not box.points:
        return _zero_germ_with_poles(dim, gens, order)
    depth = order + k
    numerator = box.exponential_sum(depth)
    for g in box.generators:
        numerator = numerator.mul_truncated(todd_series(g, depth), depth)
    if k % 2:
        numerator = -numerator
    return MeromorphicGerm.build(numerator, [(g, 1) for g in box.generators], order)


def _zero_germ_with_poles(dim: int, gens: Sequence[Sequence[Scalar]], order: int) -> MeromorphicGerm:
    return MeromorphicGerm.build(Polynomial.zero(dim), [(g, 1) for g in gens], order)


def s_affine_cone(a: AffineCone, order: int, open_marks: Iterable[int] = ()) -> MeromorphicGerm:
    """S(a) as a germ with homogeneous components through degree ``order``.

    ``open_marks`` applies to simplicial cones only: the listed facets are
    removed (facet j is the one not containing generator j).
    """
    cone = a.cone
    if not cone.is_pointed:
        logger.error(f"S requested for a cone with {len(cone.lineality)}-dimensional lineality")
        raise ValidationError("Generating function needs a pointed cone; quotient by the lineality first")
    marks = frozenset(open_marks)
    if cone.is_simplicial:
        return simplicial_germ(a.vertex, cone.generators, order, marks, a.lattice)
    if marks:
        raise ValidationError("Half-open marks are only meaningful on simplicial cones")
    pieces = simplicial_subdivision(cone)
    logger.debug(f"S of a {len(cone.generators)}-edge cone from {len(pieces)} half-open pieces")
    germs = parallel_map(
        lambda piece: simplicial_germ(a.vertex, piece[0].generators, order, piece[1], a.lattice),
        pieces,
    )
    return reduce(lambda x, y: x + y, germs)


def homogeneous_component(g: MeromorphicGerm, m: int) -> HyperFraction:
    """The degree-m part g_{[m+n]}/∏ poles of a germ."""
    return g.component(m)


# ── Continuous generating function ───────────────────
@dataclass(frozen=True, eq=False)
class IntegralTerm:
    """e^{⟨ξ,shift⟩} · fraction, the exact value of I on an affine cone."""

    fraction: HyperFraction
    shift: Vector

    @property
    def dim(self) -> int:
        return self.fraction.dim

    def germ(self, order: int) -> MeromorphicGerm:
        n = self.fraction.total_multiplicity
        depth = order + n
        if depth < 0:
            raise ValidationError(f"Germ order {order} below the pole order {-n}")
        numerator = self.fraction.numerator.mul_truncated(exp_series(self.shift, depth), depth)
        return MeromorphicGerm.build(numerator, self.fraction.poles, order)

    def __add__(self, other: IntegralTerm) -> IntegralTerm:
        if self.shift != other.shift:
            raise ValidationError("Integral terms with different vertices cannot be merged exactly")
        return IntegralTerm(self.fraction + other.fraction, self.shift)

    def to_json(self) -> dict:
        return {"exp_shift": [format_rational(x) for x in self.shift], **self.fraction.to_json()}


def i_affine_cone(a: AffineCone) -> IntegralTerm:
    """I(s + c) = (−1)^k e^{⟨ξ,s⟩} |det_Λ(v)| / ∏⟨ξ,v_j⟩ for simplicial c."""
    cone = a.cone
    if not cone.is_simplicial:
        raise ValidationError("I_affine_cone needs a simplicial cone; subdivide first")
    k = len(cone.generators)
    volume = lattice_index(cone.generators, a.lattice) if k else Fraction(1)
    sign = -1 if k % 2 else 1
    numerator = Polynomial.constant(a.dim, sign * volume)
    return IntegralTerm(HyperFraction.build(numerator, [(g, 1) for g in cone.generators]), a.vertex)


def integral_germ(a: AffineCone) -> IntegralTerm:
    """I of a pointed affine cone, summing simplicial pieces over the edge denominator."""
    cone = a.cone
    if not cone.is_pointed:
        raise ValidationError("I needs a pointed cone")
    if cone.is_simplicial:
        return i_affine_cone(a)
    pieces = simplicial_subdivision(cone)
    terms = [i_affine_cone(AffineCone(a.vertex, piece, a.lattice)) for piece, _ in pieces]
    return reduce(lambda x, y: x + y, terms)


# ── Residues ─────────────────────────────────────────
@dataclass(frozen=True)
class ResidueCheck:
    ok: bool
    edge: Vector
    mismatches: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def quotient_by_edge(a: AffineCone, v: Sequence[Scalar]) -> tuple[AffineCone, list[IntVector]]:
    """π_{V/ℝv}(a) realized in the coordinates ⟨β_i, x⟩, β an integer basis of v^⊥."""
    basis = perp_basis(v)
    dim = len(basis)
    vertex = mat_vec(basis, a.vertex)
    source = a.lattice if a.lattice is not None else [
        tuple(Fraction(int(i == j)) for j in range(a.dim)) for i in range(a.dim)
    ]
    lattice = tuple(lattice_basis([mat_vec(basis, b) for b in source], dim)) if dim else None
    direction = primitive(v)[0]
    images = [mat_vec(basis, g) for g in a.cone.generators if primitive(g)[0] != direction]
    images = [g for g in images if any(g)]
    cone = Cone.from_generators(images, dim, lattice=lattice) if images else Cone(dim, ())
    return AffineCone(vertex, cone, lattice), basis


def _component_or_zero(g: MeromorphicGerm, m: int) -> HyperFraction:
    if m < -g.total_multiplicity:
        return HyperFraction.polynomial(Polynomial.zero(g.dim))
    return g.component(m)


def residue_check(a: AffineCone, v: Sequence[Scalar], order: int = 3) -> ResidueCheck:
    """Res_v S(a) = −S(π a) and Res_v I(a) = −I(π a) as germs through degree ``order``."""
    edge = tuple(Fraction(x) for x in v)
    direction = primitive(edge)[0]
    if all(primitive(g)[0] != direction for g in a.cone.generators):
        raise ValidationError(f"{edge} is not an edge of the cone")
    quotient, basis = quotient_by_edge(a, edge)
    mismatches: list[str] = []
    pairs = [
        ("S", s_affine_cone(a, order).residue(edge, basis), s_affine_cone(quotient, order + 1)),
        ("I", integral_germ(a).germ(order).residue(edge, basis), integral_germ(quotient).germ(order + 1)),
    ]
    for name, lhs, rhs in pairs:
        low = -max(lhs.total_multiplicity, rhs.total_multiplicity)
        for m in range(low, order + 2):
            if not _component_or_zero(lhs, m) == -_component_or_zero(rhs, m):
                mismatches.append(f"Res {name} degree {m}")
    if mismatches:
        logger.warning(f"Residue law fails along {edge}: {', '.join(mismatches)}")
    return ResidueCheck(not mismatches, edge, tuple(mismatches))


# ── Numeric oracle ───────────────────────────────────
def exponential_sum(a: AffineCone, xi: Sequence[float], steps: int) -> float:
    """Σ e^{⟨ξ,x⟩} over lattice points x = b + Σ n_j v_j of a with n_j < steps.

    Needs ⟨ξ, v⟩ < 0 on every edge so the truncation converges to S(a)(ξ).
    """
    cone = a.cone
    for g in cone.generators:
        if sum(float(c) * x for c, x in zip(g, xi)) >= 0:
            raise ValidationError(f"⟨ξ, {tuple(g)}⟩ must be negative for the sum to converge")
    pieces = [(cone, frozenset())] if cone.is_simplicial else simplicial_subdivision(cone)
    total = 0.0
    for piece, marks in pieces:
        box = box_points(a.vertex, piece.generators, marks, a.lattice)
        steps_per_gen = [
            sum(float(c) * x for c, x in zip(g, xi)) for g in piece.generators
        ]
        geometric = 0.0
        for ns in product(range(steps), repeat=len(steps_per_gen)):
            geometric += math.exp(sum(n * w for n, w in zip(ns, steps_per_gen)))
        for x in box.points:
            total += math.exp(sum(float(c) * y for c, y in zip(x, xi))) * geometric
    return total
