"""
Rational polyhedra, cones and their faces.

Polyhedra are stored by an irredundant H-representation ⟨a, x⟩ ≤ b with
primitive integer normals a. Vertices and extreme rays of the pointed part
(P intersected with the standard orthogonal complement of its lineality
space) are found by enumerating tight subsystems, which is adequate at the
dimensions this package targets (d ≤ 4, a handful of facets).

Cones are kept by their extreme rays. Subdivisions are half-open: each piece
carries the set of its facets that are removed, chosen with a generic point
so that indicator functions add up exactly.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product

from loguru import logger

from emk.algebra import Scalar, Vector, dot, format_rational, primitive
from emk.errors import ValidationError
from emk.hyperfrac import ScalarProduct
from emk.linalg import (
    coordinates,
    in_lattice,
    integer_basis,
    is_independent,
    lattice_basis,
    lattice_index,
    lattice_point,
    mat_vec,
    nullspace,
    rank,
    solve,
    transpose,
)

IntVector = tuple[int, ...]
Inequality = tuple[IntVector, Fraction]


def _vec(values: Iterable[Scalar]) -> Vector:
    return tuple(Fraction(x) for x in values)


def _origin(dim: int) -> Vector:
    return tuple(Fraction(0) for _ in range(dim))


def _span_dimension(vertices: Sequence[Vector], rays: Sequence[Sequence[Scalar]], lineality: Sequence[Sequence[Scalar]]) -> int:
    directions = [tuple(a - b for a, b in zip(v, vertices[0])) for v in vertices[1:]]
    directions += [_vec(r) for r in rays] + [_vec(l) for l in lineality]
    directions = [d for d in directions if any(d)]
    return rank(directions) if directions else 0


def _normalize_inequality(a: Sequence[Scalar], b: Scalar) -> Inequality | None:
    """Scale to a primitive integer normal; None for the trivial inequality 0 ≤ b."""
    a = _vec(a)
    b = Fraction(b)
    if not any(a):
        if b < 0:
            raise ValidationError("Polyhedron is empty (0 ≤ negative constant)")
        return None
    prim, scale = primitive(a)
    return prim, b / scale


# ── V-representation ─────────────────────────────────
@dataclass(frozen=True)
class _VRep:
    lineality: tuple[IntVector, ...]
    vertices: tuple[Vector, ...]
    rays: tuple[IntVector, ...]


def _compute_vrep(dim: int, rows: Sequence[Inequality]) -> _VRep:
    normals = [a for a, _ in rows]
    lineality = tuple(integer_basis(nullspace(normals, dim), dim)) if normals else tuple(
        tuple(int(i == j) for j in range(dim)) for i in range(dim)
    )
    r = dim - len(lineality)
    if r == 0:
        return _VRep(lineality, (_origin(dim),), ())

    def feasible(x: Vector) -> bool:
        return all(dot(a, x) <= b for a, b in rows)

    vertices: list[Vector] = []
    for subset in combinations(range(len(rows)), r):
        system = [rows[i][0] for i in subset] + list(lineality)
        rhs = [rows[i][1] for i in subset] + [0] * len(lineality)
        x = solve(system, rhs)
        if x is not None and feasible(x) and x not in vertices:
            vertices.append(x)

    rays: list[IntVector] = []
    for subset in combinations(range(len(rows)), r - 1):
        system = [rows[i][0] for i in subset] + list(lineality)
        kernel = nullspace(system, dim) if system else nullspace([], dim)
        if len(kernel) != 1:
            continue
        for sign in (1, -1):
            direction = tuple(sign * x for x in kernel[0])
            if all(dot(a, direction) <= 0 for a in normals):
                ray = primitive(direction)[0]
                if ray not in rays:
                    rays.append(ray)
    return _VRep(lineality, tuple(sorted(vertices)), tuple(sorted(rays)))


# ── Polyhedron ───────────────────────────────────────
class Polyhedron:
    """{x ∈ ℚ^d : ⟨a_i, x⟩ ≤ b_i}, canonicalized to an irredundant system."""

    def __init__(self, dim: int, inequalities: Iterable[tuple[Sequence[Scalar], Scalar]]) -> None:
        self.dim_ambient = dim
        best: dict[IntVector, Fraction] = {}
        for a, b in inequalities:
            if len(a) != dim:
                raise ValidationError(f"Inequality normal {tuple(a)} does not match dimension {dim}")
            row = _normalize_inequality(a, b)
            if row is None:
                continue
            normal, rhs = row
            if normal not in best or rhs < best[normal]:
                best[normal] = rhs
        raw = sorted(best.items())
        vrep = _compute_vrep(dim, raw)
        if not vrep.vertices:
            logger.error(f"Empty polyhedron given by {len(raw)} inequalities")
            raise ValidationError("Polyhedron is empty")
        self.inequalities: tuple[Inequality, ...] = self._irredundant(dim, raw, vrep)

    @staticmethod
    def _irredundant(dim: int, rows: Sequence[Inequality], vrep: _VRep) -> tuple[Inequality, ...]:
        def tight(a: IntVector, b: Fraction) -> tuple[frozenset[int], frozenset[int]]:
            return (
                frozenset(i for i, v in enumerate(vrep.vertices) if dot(a, v) == b),
                frozenset(i for i, r in enumerate(vrep.rays) if dot(a, r) == 0),
            )

        all_tight = (frozenset(range(len(vrep.vertices))), frozenset(range(len(vrep.rays))))
        full_dim = _span_dimension(vrep.vertices, vrep.rays, vrep.lineality)
        implicit = [a for a, b in rows if tight(a, b) == all_tight]
        kept: list[Inequality] = []
        if implicit:
            anchor = vrep.vertices[0]
            for e in integer_basis(implicit, dim):
                value = dot(e, anchor)
                kept.append((e, value))
                kept.append((tuple(-x for x in e), -value))
        seen: set[tuple[frozenset[int], frozenset[int]]] = set()
        for a, b in rows:
            signature = tight(a, b)
            if signature == all_tight or signature in seen:
                continue
            verts = [vrep.vertices[i] for i in sorted(signature[0])]
            if not verts:
                continue
            rays = [vrep.rays[i] for i in sorted(signature[1])]
            if _span_dimension(verts, rays, vrep.lineality) == full_dim - 1:
                seen.add(signature)
                kept.append((a, b))
        return tuple(sorted(kept))

    @classmethod
    def from_generators(
        cls,
        dim: int,
        vertices: Sequence[Sequence[Scalar]],
        rays: Sequence[Sequence[Scalar]] = (),
        lines: Sequence[Sequence[Scalar]] = (),
    ) -> Polyhedron:
        """conv(vertices) + cone(rays) + span(lines), converted to inequalities."""
        if not vertices:
            raise ValidationError("At least one vertex is required")
        gens: list[Vector] = [_vec(v) + (Fraction(1),) for v in vertices]
        gens += [_vec(r) + (Fraction(0),) for r in rays if any(Fraction(x) for x in r)]
        for line in lines:
            if any(Fraction(x) for x in line):
                gens.append(_vec(line) + (Fraction(0),))
                gens.append(tuple(-Fraction(x) for x in line) + (Fraction(0),))
        if any(len(g) != dim + 1 for g in gens):
            raise ValidationError(f"Generators do not match dimension {dim}")
        k = rank(gens)
        inequalities: list[tuple[Vector, Fraction]] = []
        for n in nullspace(gens):
            inequalities.append((n[:dim], -n[dim]))
            inequalities.append((tuple(-x for x in n[:dim]), n[dim]))
        span = integer_basis(gens, dim + 1)
        for subset in combinations(range(len(gens)), k - 1):
            chosen = [gens[i] for i in subset]
            if chosen and rank(chosen) < k - 1:
                continue
            system = [tuple(dot(b, g) for b in span) for g in chosen]
            kernel = nullspace(system, len(span))
            if len(kernel) != 1:
                continue
            normal = tuple(sum((c * b[i] for c, b in zip(kernel[0], span)), Fraction(0)) for i in range(dim + 1))
            values = [dot(normal, g) for g in gens]
            if all(v <= 0 for v in values):
                normal = tuple(-x for x in normal)
            elif not all(v >= 0 for v in values):
                continue
            if not any(normal[:dim]):
                continue
            # normal·(x, 1) ≥ 0  ⇔  −a·x ≤ β
            inequalities.append((tuple(-x for x in normal[:dim]), normal[dim]))
        return cls(dim, inequalities)

    # ── cached geometry ──────────────────────────────
    @cached_property
    def _vrep(self) -> _VRep:
        return _compute_vrep(self.dim_ambient, self.inequalities)

    @property
    def lineality(self) -> tuple[IntVector, ...]:
        return self._vrep.lineality

    @property
    def vertices(self) -> tuple[Vector, ...]:
        """Vertices of P ∩ lineality^⊥ (the actual vertices when P is pointed)."""
        return self._vrep.vertices

    @property
    def rays(self) -> tuple[IntVector, ...]:
        return self._vrep.rays

    @cached_property
    def dimension(self) -> int:
        return _span_dimension(self.vertices, self.rays, self.lineality)

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @property
    def is_bounded(self) -> bool:
        return not self.lineality and not self.rays

    @cached_property
    def faces(self) -> tuple[Face, ...]:
        return tuple(face_lattice(self))

    @cached_property
    def is_lattice(self) -> bool:
        """Every face contains a lattice point (checked on minimal faces)."""
        d = self.dim_ambient
        if not self.lineality:
            return all(x.denominator == 1 for v in self.vertices for x in v)
        q = ScalarProduct.identity(d)
        proj = q.complement_projection(self.lineality)
        image = lattice_basis([mat_vec(proj, e) for e in _unit_vectors(d)], d)
        return all(in_lattice(image, mat_vec(proj, v)) for v in self.vertices)

    # ── membership and scaling ───────────────────────
    def contains(self, x: Sequence[Scalar]) -> bool:
        return all(dot(a, x) <= b for a, b in self.inequalities)

    def contains_dilated(self, x: Sequence[Scalar], t: Scalar) -> bool:
        """x ∈ tP."""
        return all(dot(a, x) <= b * t for a, b in self.inequalities)

    def dilate(self, t: Scalar) -> Polyhedron:
        t = Fraction(t)
        if t <= 0:
            raise ValidationError(f"Dilation factor must be positive, got {t}")
        return Polyhedron(self.dim_ambient, [(a, b * t) for a, b in self.inequalities])

    def bounding_box(self) -> tuple[Vector, Vector]:
        if not self.is_bounded:
            raise ValidationError("Unbounded polyhedron has no bounding box")
        d = self.dim_ambient
        lo = tuple(min(v[i] for v in self.vertices) for i in range(d))
        hi = tuple(max(v[i] for v in self.vertices) for i in range(d))
        return lo, hi

    def lattice_points(self, t: Scalar = 1) -> list[IntVector]:
        """Integer points of tP (bounded P)."""
        t = Fraction(t)
        lo, hi = self.bounding_box()
        ranges = [range(math.ceil(l * t), math.floor(h * t) + 1) for l, h in zip(lo, hi)]
        return [x for x in product(*ranges) if self.contains_dilated(x, t)]

    def face(self, active: Iterable[int]) -> Face:
        key = tuple(sorted(active))
        for f in self.faces:
            if f.key == key:
                return f
        raise ValidationError(f"No face with active set {key}")

    def to_json(self) -> dict:
        return {
            "dim": self.dim_ambient,
            "inequalities": [{"a": list(a), "b": format_rational(b)} for a, b in self.inequalities],
        }

    def __repr__(self) -> str:
        return f"Polyhedron(dim={self.dim_ambient}, inequalities={len(self.inequalities)})"


def _unit_vectors(d: int) -> list[Vector]:
    return [tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)]


# ── Faces ────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class Face:
    parent: Polyhedron
    active: frozenset[int]
    vertices: tuple[Vector, ...]
    rays: tuple[IntVector, ...]
    dim: int
    span_basis: tuple[IntVector, ...]
    affine_point: Vector

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.active))

    @property
    def is_bounded(self) -> bool:
        return not self.rays and not self.parent.lineality

    def contains(self, other: Face) -> bool:
        return self.active <= other.active

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Face):
            return NotImplemented
        return self.parent is other.parent and self.active == other.active

    def __hash__(self) -> int:
        return hash((id(self.parent), self.active))

    def describe(self) -> str:
        if self.dim == len(self.parent.lineality) and not self.rays:
            point = ",".join(format_rational(x) for x in self.affine_point)
            return f"vertex ({point})" if not self.parent.lineality else f"minimal face through ({point})"
        return f"{self.dim}-face {list(self.key)}"

    def to_json(self) -> dict:
        return {
            "active": list(self.key),
            "dim": self.dim,
            "vertices": [[format_rational(x) for x in v] for v in self.vertices],
            "rays": [list(r) for r in self.rays],
        }


def _closure(p: Polyhedron, subset: Iterable[int]) -> Face | None:
    subset = list(subset)
    rows = p.inequalities
    verts = tuple(v for v in p.vertices if all(dot(rows[i][0], v) == rows[i][1] for i in subset))
    if not verts:
        return None
    rays = tuple(r for r in p.rays if all(dot(rows[i][0], r) == 0 for i in subset))
    active = frozenset(
        i
        for i, (a, b) in enumerate(rows)
        if all(dot(a, v) == b for v in verts) and all(dot(a, r) == 0 for r in rays)
    )
    directions = [tuple(a - b for a, b in zip(v, verts[0])) for v in verts[1:]]
    directions += [_vec(r) for r in rays] + [_vec(l) for l in p.lineality]
    span = tuple(integer_basis(directions, p.dim_ambient))
    return Face(p, active, verts, rays, len(span), span, verts[0])


def face_lattice(p: Polyhedron) -> list[Face]:
    """All non-empty faces of P, including P, ordered by (dimension, active set)."""
    top = _closure(p, [])
    assert top is not None
    found: dict[frozenset[int], Face] = {top.active: top}
    queue = [top]
    while queue:
        face = queue.pop()
        for i in range(len(p.inequalities)):
            if i in face.active:
                continue
            child = _closure(p, face.active | {i})
            if child is not None and child.active not in found:
                found[child.active] = child
                queue.append(child)
    faces = sorted(found.values(), key=lambda f: (f.dim, f.key))
    logger.debug(f"Face lattice of {p!r}: {len(faces)} faces")
    return faces


def facets_of(p: Polyhedron, face: Face) -> list[Face]:
    return [g for g in p.faces if g.dim == face.dim - 1 and face.active < g.active]


def triangulate_face(p: Polyhedron, face: Face) -> list[tuple[Vector, ...]]:
    """Pulling triangulation of a bounded face into simplices on its vertices."""
    if not face.is_bounded:
        raise ValidationError(f"Cannot triangulate unbounded face {face.key}")
    if face.dim == 0:
        return [(face.vertices[0],)]
    apex = min(face.vertices)
    simplices = []
    for g in facets_of(p, face):
        if apex in g.vertices:
            continue
        for simplex in triangulate_face(p, g):
            simplices.append((apex, *simplex))
    return simplices


# ── Cones ────────────────────────────────────────────
def lattice_primitive(v: Sequence[Scalar], lattice: Sequence[Sequence[Scalar]] | None) -> Vector:
    """Shortest positive multiple of v lying in the lattice (ℤ^d when ``lattice`` is None)."""
    if lattice is None:
        return _vec(primitive(v)[0])
    coords = coordinates(lattice, v)
    if coords is None:
        raise ValidationError(f"Vector {tuple(v)} is outside the lattice span")
    return lattice_point(lattice, primitive(coords)[0])


@dataclass(frozen=True, eq=False)
class Cone:
    """Cone generated by extreme rays plus a lineality space."""

    dim: int
    generators: tuple[Vector, ...]
    lineality: tuple[Vector, ...] = ()

    @classmethod
    def from_generators(
        cls,
        vectors: Sequence[Sequence[Scalar]],
        dim: int | None = None,
        lineality: Sequence[Sequence[Scalar]] = (),
        lattice: Sequence[Sequence[Scalar]] | None = None,
    ) -> Cone:
        """Keep the extreme rays among ``vectors`` (input order), made lattice-primitive."""
        vecs = [_vec(v) for v in vectors if any(Fraction(x) for x in v)]
        if dim is None:
            if not vecs:
                raise ValidationError("Cannot infer the dimension of an empty cone")
            dim = len(vecs[0])
        if not vecs and not lineality:
            return cls(dim, (), ())
        hull = Polyhedron.from_generators(dim, [_origin(dim)], vecs, lineality)
        extreme = set(hull.rays)
        gens: list[Vector] = []
        seen: set[IntVector] = set()
        if not hull.lineality:
            for v in vecs:
                direction = primitive(v)[0]
                if direction in extreme and direction not in seen:
                    seen.add(direction)
                    gens.append(lattice_primitive(v, lattice))
        else:
            gens = [lattice_primitive(r, lattice) for r in hull.rays]
        lin = tuple(_vec(l) for l in hull.lineality)
        return cls(dim, tuple(gens), lin)

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @cached_property
    def rank(self) -> int:
        vectors = list(self.generators) + list(self.lineality)
        return rank(vectors) if vectors else 0

    @property
    def is_simplicial(self) -> bool:
        return self.is_pointed and len(self.generators) == self.rank

    def index(self, lattice: Sequence[Sequence[Scalar]] | None = None) -> Fraction:
        if not self.is_simplicial:
            raise ValidationError("Lattice index is defined for simplicial cones")
        return lattice_index(self.generators, lattice)

    def is_unimodular(self, lattice: Sequence[Sequence[Scalar]] | None = None) -> bool:
        return self.is_simplicial and self.index(lattice) == 1

    @cached_property
    def polyhedron(self) -> Polyhedron:
        return Polyhedron.from_generators(self.dim, [_origin(self.dim)], self.generators, self.lineality)

    def generator_index(self, ray: Sequence[Scalar]) -> int:
        direction = primitive(ray)[0]
        for i, g in enumerate(self.generators):
            if primitive(g)[0] == direction:
                return i
        raise ValidationError(f"{tuple(ray)} is not an edge of the cone")

    def contains(self, x: Sequence[Scalar]) -> bool:
        return self.polyhedron.contains(x)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "rays": [[format_rational(x) for x in g] for g in self.generators],
            "lineality": [[format_rational(x) for x in l] for l in self.lineality],
        }


@dataclass(frozen=True, eq=False)
class AffineCone:
    """s + cone, with an optional ℤ-basis of the ambient lattice (ℤ^d when None)."""

    vertex: Vector
    cone: Cone
    lattice: tuple[Vector, ...] | None = None

    @property
    def dim(self) -> int:
        return self.cone.dim

    def dilate(self, t: Scalar) -> AffineCone:
        t = Fraction(t)
        if t <= 0:
            raise ValidationError(f"Dilation factor must be positive, got {t}")
        return AffineCone(tuple(t * x for x in self.vertex), self.cone, self.lattice)

    def translate(self, v: Sequence[Scalar]) -> AffineCone:
        return AffineCone(tuple(a + Fraction(b) for a, b in zip(self.vertex, v)), self.cone, self.lattice)

    def to_json(self) -> dict:
        data = {"vertex": [format_rational(x) for x in self.vertex], **self.cone.to_json()}
        if self.lattice is not None:
            data["lattice"] = [[format_rational(x) for x in b] for b in self.lattice]
        return data


@dataclass(frozen=True)
class QuotientLattice:
    """Lattice data of V/L realized on the Q-orthogonal complement of L."""

    mod_basis: tuple[IntVector, ...]
    proj_matrix: tuple[Vector, ...]
    image_basis: tuple[Vector, ...]

    def project(self, v: Sequence[Scalar]) -> Vector:
        return mat_vec(self.proj_matrix, v)


def quotient_lattice(dim: int, subspace: Sequence[Sequence[Scalar]], q: ScalarProduct) -> QuotientLattice:
    mod = tuple(integer_basis(subspace, dim)) if subspace else ()
    proj = q.complement_projection(mod)
    image = tuple(lattice_basis([mat_vec(proj, e) for e in _unit_vectors(dim)], dim))
    return QuotientLattice(mod, proj, image)


# ── Supporting and transverse cones ──────────────────
def _check_face(p: Polyhedron, f: Face) -> None:
    if f.parent is not p and f.parent.inequalities != p.inequalities:
        raise ValidationError(f"Face {f.key} does not belong to the polyhedron")


def supporting_cone(p: Polyhedron, f: Face) -> AffineCone:
    """C(P, f): the cone of the inequalities active on f, placed at a point of f."""
    _check_face(p, f)
    d = p.dim_ambient
    rows = [(p.inequalities[i][0], 0) for i in sorted(f.active)]
    if not rows:
        cone = Cone(d, (), tuple(_vec(e) for e in _unit_vectors(d)))
    else:
        tangent = Polyhedron(d, rows)
        cone = Cone(d, tuple(_vec(r) for r in tangent.rays), tuple(_vec(l) for l in tangent.lineality))
    return AffineCone(f.affine_point, cone)


def transverse_cone(
    p: Polyhedron, f: Face, q: ScalarProduct | None = None
) -> tuple[AffineCone, QuotientLattice]:
    """Pointed image of C(P, f) in V/lin(f), realized on C_Q(lin f) with the projected lattice."""
    _check_face(p, f)
    q = q or ScalarProduct.identity(p.dim_ambient)
    support = supporting_cone(p, f)
    quotient = quotient_lattice(p.dim_ambient, f.span_basis, q)
    images = [quotient.project(g) for g in support.cone.generators]
    images = [v for v in images if any(v)]
    vertex = quotient.project(f.affine_point)
    if images:
        cone = Cone.from_generators(images, p.dim_ambient, lattice=quotient.image_basis)
    else:
        cone = Cone(p.dim_ambient, ())
    if not cone.is_pointed:
        raise ValidationError(f"Transverse cone along face {f.key} is not pointed")
    return AffineCone(vertex, cone, quotient.image_basis), quotient


def lineality_and_project(
    p: Polyhedron, q: ScalarProduct | None = None
) -> tuple[QuotientLattice, Polyhedron]:
    """Lineality space L of P and the pointed polyhedron P ∩ C_Q(L)."""
    d = p.dim_ambient
    q = q or ScalarProduct.identity(d)
    quotient = quotient_lattice(d, p.lineality, q)
    rows: list[tuple[Sequence[Scalar], Scalar]] = list(p.inequalities)
    for l in quotient.mod_basis:
        normal = q.apply(l)
        rows.append((normal, 0))
        rows.append((tuple(-x for x in normal), 0))
    return quotient, Polyhedron(d, rows)


# ── Subdivisions ─────────────────────────────────────
def fundamental_points(
    s: Sequence[Scalar], gens: Sequence[Sequence[Scalar]], open_marks: Iterable[int] = ()
) -> list[IntVector]:
    """Integer points of s + Σ_j I_j v_j with I_j = [0,1), or (0,1] for marked j."""
    s = _vec(s)
    marks = set(open_marks)
    d = len(s)
    if not gens:
        return [tuple(int(x) for x in s)] if all(x.denominator == 1 for x in s) else []
    vs = [_vec(g) for g in gens]
    if not is_independent(vs):
        raise ValidationError("Box generators are linearly dependent")
    lo = [math.floor(s[i] + sum(min(Fraction(0), v[i]) for v in vs)) for i in range(d)]
    hi = [math.ceil(s[i] + sum(max(Fraction(0), v[i]) for v in vs)) for i in range(d)]
    columns = transpose(vs)
    points: list[IntVector] = []
    for x in product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        offset = tuple(Fraction(xi) - si for xi, si in zip(x, s))
        lam = solve(columns, offset)
        if lam is None:
            continue
        ok = True
        for j, value in enumerate(lam):
            if j in marks:
                ok = 0 < value <= 1
            else:
                ok = 0 <= value < 1
            if not ok:
                break
        if ok:
            points.append(x)
    return points


def _generic_point(
    gens: Sequence[Vector],
    pieces: Sequence[Sequence[Vector]],
    signs: Sequence[int] | None = None,
) -> Vector:
    """Point Σ σ_j w_j g_j with no vanishing coordinate in any piece."""
    signs = signs or [1] * len(gens)
    for attempt in range(64):
        weights = [Fraction(1) + Fraction(1, (attempt + 2) ** (i + 1)) for i in range(len(gens))]
        y = tuple(
            sum((sg * w * g[k] for sg, w, g in zip(signs, weights, gens)), Fraction(0))
            for k in range(len(gens[0]))
        )
        if all(
            all(c != 0 for c in (coordinates(list(piece), y) or (Fraction(0),)))
            for piece in pieces
        ):
            if attempt:
                logger.warning(f"Generic point found after {attempt + 1} attempts")
            return y
    raise ValidationError("Could not find a generic point for the half-open subdivision")


def _half_open(pieces: Sequence[Sequence[Vector]], y: Vector, dim: int) -> list[tuple[Cone, frozenset[int]]]:
    out = []
    for piece in pieces:
        lam = coordinates(list(piece), y)
        assert lam is not None
        marks = frozenset(j for j, c in enumerate(lam) if c < 0)
        out.append((Cone(dim, tuple(piece)), marks))
    return out


def _pulling(cone: Cone) -> list[tuple[int, ...]]:
    """Pulling triangulation of a pointed cone as tuples of generator indices."""
    hull = cone.polyhedron

    def indices(face: Face) -> list[int]:
        return sorted(cone.generator_index(r) for r in face.rays)

    def triangulate(face: Face) -> list[tuple[int, ...]]:
        idx = indices(face)
        if len(idx) == face.dim:
            return [tuple(idx)]
        first = idx[0]
        out = []
        for g in facets_of(hull, face):
            if first in indices(g):
                continue
            out.extend((first, *simplex) for simplex in triangulate(g))
        return out

    top = next(f for f in hull.faces if not f.active or f.dim == hull.dimension)
    return triangulate(top)


def simplicial_subdivision(cone: Cone) -> list[tuple[Cone, frozenset[int]]]:
    """Half-open simplicial cones on the edges of ``cone`` tiling it exactly."""
    if not cone.is_pointed:
        raise ValidationError("Simplicial subdivision needs a pointed cone")
    if cone.is_simplicial:
        return [(cone, frozenset())]
    pieces = [[cone.generators[i] for i in simplex] for simplex in _pulling(cone)]
    y = _generic_point(cone.generators, pieces)
    logger.debug(f"Subdivided cone with {len(cone.generators)} edges into {len(pieces)} simplicial pieces")
    return _half_open(pieces, y, cone.dim)


def _star_subdivide(gens: tuple[Vector, ...]) -> list[tuple[Vector, ...]]:
    if lattice_index(gens) == 1:
        return [gens]
    origin = _origin(len(gens[0]))
    best: tuple[Fraction, IntVector, Vector] | None = None
    columns = transpose(gens)
    for x in fundamental_points(origin, gens):
        if not any(x):
            continue
        lam = solve(columns, x)
        assert lam is not None
        candidate = (sum(lam), x, lam)
        if best is None or candidate[:2] < best[:2]:
            best = candidate
    assert best is not None
    _, w, lam = best
    out: list[tuple[Vector, ...]] = []
    for j, value in enumerate(lam):
        if value == 0:
            continue
        replaced = gens[:j] + (_vec(w),) + gens[j + 1 :]
        out.extend(_star_subdivide(replaced))
    return out


def unimodular_subdivision(
    cone: Cone, open_marks: Iterable[int] = ()
) -> list[tuple[Cone, frozenset[int]]]:
    """Half-open unimodular cones tiling a (half-open) simplicial cone exactly."""
    if not cone.is_simplicial:
        raise ValidationError("Unimodular subdivision needs a simplicial cone")
    marks = frozenset(open_marks)
    gens = tuple(_vec(g) for g in cone.generators)
    pieces = _star_subdivide(gens)
    if len(pieces) == 1 and not marks:
        return [(cone, frozenset())]
    signs = [-1 if j in marks else 1 for j in range(len(gens))]
    y = _generic_point(gens, pieces, signs)
    logger.debug(f"Index {cone.index()} cone split into {len(pieces)} unimodular pieces")
    return _half_open(pieces, y, cone.dim)
