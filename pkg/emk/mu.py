"""
μ-functions of affine cones and the local Euler–Maclaurin decomposition.

μ_Q(s + c) is the renormalization of the shifted generating function
e^{−⟨ξ,s⟩} S(s + c): its homogeneous components are polynomials on V*.
Cones living in a quotient V/L are handled on the Q-orthogonal complement
of L inside V with the projected lattice; renormalizing there in ambient
coordinates gives the same polynomials as renormalizing in the quotient and
pulling back, so every μ here is a polynomial in the ambient ξ.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from loguru import logger

from emk.algebra import Polynomial, Scalar, exp_series, format_rational
from emk.errors import ValidationError
from emk.genfun import IntegralTerm, integral_germ, s_affine_cone
from emk.hyperfrac import (
    HyperFraction,
    MeromorphicGerm,
    ScalarProduct,
    decompose_simple_poles,
    renormalize_germ,
)
from emk.linalg import lattice_basis, mat_vec
from emk.polyhedra import AffineCone, Cone, Face, Polyhedron, transverse_cone
from emk.workers import parallel_map


@dataclass(frozen=True, eq=False)
class MuFunction:
    cone: AffineCone
    scalar_product: ScalarProduct
    components: tuple[Polynomial, ...]

    @property
    def order(self) -> int:
        return len(self.components) - 1

    def component(self, m: int) -> Polynomial:
        if not 0 <= m <= self.order:
            raise ValidationError(f"μ known through degree {self.order}, degree {m} requested")
        return self.components[m]

    def is_invariant_under(self, eta: Sequence[Scalar]) -> bool:
        """True when every component is unchanged by ξ → ξ + η."""
        d = self.cone.dim
        images = [Polynomial.variable(d, i) + Fraction(eta[i]) for i in range(d)]
        return all(p.substitute(images) == p for p in self.components)

    def to_json(self) -> dict:
        return {
            "cone": self.cone.to_json(),
            "components": [p.to_json("xi") for p in self.components],
        }


def _check_order(order: int) -> None:
    if order < 0:
        raise ValidationError(f"Order must be non-negative, got {order}")


def _check_q(a: AffineCone, q: ScalarProduct) -> None:
    if q.dim != a.dim:
        raise ValidationError(f"Scalar product of dimension {q.dim} for a cone in dimension {a.dim}")


def shifted_germ(a: AffineCone, order: int) -> MeromorphicGerm:
    """M(s, c) = e^{−⟨ξ,s⟩} S(s + c) through degree ``order``."""
    germ = s_affine_cone(a, order)
    depth = order + germ.total_multiplicity
    return germ.multiply_series(exp_series(tuple(-x for x in a.vertex), depth), depth)


def mu(a: AffineCone, q: ScalarProduct | None = None, order: int = 2) -> MuFunction:
    """μ_Q(a) = R_Q(e^{−⟨ξ,s⟩} S(a)) for a pointed affine cone."""
    _check_order(order)
    q = q or ScalarProduct.identity(a.dim)
    _check_q(a, q)
    if not a.cone.is_pointed:
        raise ValidationError("μ needs a pointed cone; use mu_embedded for cones with lineality")
    components = renormalize_germ(shifted_germ(a, order), q, order)
    logger.debug(f"μ of a {len(a.cone.generators)}-edge cone through degree {order}")
    return MuFunction(a, q, components)


def project_lineality(a: AffineCone, q: ScalarProduct) -> AffineCone:
    """Image of a in V/lin(a), realized on the Q-orthogonal complement with the projected lattice."""
    d = a.dim
    if a.cone.is_pointed:
        return a
    proj = q.complement_projection(a.cone.lineality)
    source = a.lattice if a.lattice is not None else [
        tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)
    ]
    lattice = tuple(lattice_basis([mat_vec(proj, b) for b in source], d))
    images = [mat_vec(proj, g) for g in a.cone.generators]
    images = [g for g in images if any(g)]
    cone = Cone.from_generators(images, d, lattice=lattice) if images else Cone(d, ())
    return AffineCone(mat_vec(proj, a.vertex), cone, lattice)


def mu_embedded(a: AffineCone, q: ScalarProduct | None = None, order: int = 2) -> MuFunction:
    """μ of an affine cone taken modulo its lineality, as a polynomial on V*."""
    q = q or ScalarProduct.identity(a.dim)
    _check_q(a, q)
    return mu(project_lineality(a, q), q, order)


def mu_transverse(p: Polyhedron, f: Face, q: ScalarProduct | None = None, order: int = 2) -> MuFunction:
    q = q or ScalarProduct.identity(p.dim_ambient)
    tc, _ = transverse_cone(p, f, q)
    return mu(tc, q, order)


def mu_at_dilation(tc: AffineCone, t: Scalar, q: ScalarProduct | None = None, order: int = 2) -> MuFunction:
    """μ(t·tc): the vertex is scaled, the cone and its lattice are kept."""
    t = Fraction(t)
    if t <= 0:
        raise ValidationError(f"Dilation parameter must be positive, got {t}")
    return mu(tc.dilate(t), q, order)


def mu_simplicial_direct(a: AffineCone, q: ScalarProduct | None = None, order: int = 2) -> tuple[Polynomial, ...]:
    """μ components of a simplicial cone from the subset recursion on simple poles."""
    _check_order(order)
    q = q or ScalarProduct.identity(a.dim)
    if not a.cone.is_simplicial:
        raise ValidationError("The direct decomposition needs a simplicial cone")
    germ = shifted_germ(a, order)
    out = []
    for m in range(order + 1):
        polynomial = Polynomial.zero(a.dim)
        for component in decompose_simple_poles(germ.component(m), q):
            if component.dimension == 0:
                polynomial = component.term.numerator
        out.append(polynomial)
    return tuple(out)


# ── Local Euler–Maclaurin decomposition ──────────────
@dataclass(frozen=True, eq=False)
class FaceContribution:
    face: Face
    transverse: AffineCone
    mu: MuFunction
    integral: IntegralTerm

    def to_json(self) -> dict:
        return {
            "face": self.face.to_json(),
            "transverse_vertex": [format_rational(x) for x in self.transverse.vertex],
            "mu": [p.to_json("xi") for p in self.mu.components],
            "integral": self.integral.to_json(),
        }


@dataclass(frozen=True, eq=False)
class LocalEMLDecomposition:
    cone: AffineCone
    polyhedron: Polyhedron
    per_face: tuple[FaceContribution, ...]
    depth: int

    @property
    def dimension(self) -> int:
        return self.polyhedron.dimension

    def component(self, m: int) -> HyperFraction:
        """Degree-m part of Σ_f μ(t(a, f)) I(f)."""
        if not -self.dimension <= m <= self.depth - self.dimension:
            raise ValidationError(
                f"Degree {m} outside [{-self.dimension}, {self.depth - self.dimension}]"
            )
        total = HyperFraction.polynomial(Polynomial.zero(self.cone.dim))
        for part in self.per_face:
            k = part.face.dim
            integral = part.integral.germ(self.depth - self.dimension)
            for j in range(0, m + k + 1):
                total = total + integral.component(m - j) * part.mu.component(j)
        return total

    def mismatches(self) -> list[int]:
        """Degrees where the reconstruction differs from S(a)."""
        germ = s_affine_cone(self.cone, self.depth - self.dimension)
        bad = []
        for m in range(-self.dimension, self.depth - self.dimension + 1):
            if not self.component(m) == germ.component(m):
                bad.append(m)
        return bad

    def to_json(self) -> dict:
        return {
            "cone": self.cone.to_json(),
            "depth": self.depth,
            "faces": [part.to_json() for part in self.per_face],
        }


def local_eml(a: AffineCone, q: ScalarProduct | None = None, order: int = 2) -> LocalEMLDecomposition:
    """Per-face μ and I data of a pointed affine cone with the standard lattice."""
    _check_order(order)
    q = q or ScalarProduct.identity(a.dim)
    _check_q(a, q)
    if a.lattice is not None:
        raise ValidationError("local_eml works with the standard lattice ℤ^d")
    if not a.cone.is_pointed:
        raise ValidationError("local_eml needs a pointed cone")
    p = Polyhedron.from_generators(a.dim, [a.vertex], a.cone.generators)

    def contribution(f: Face) -> FaceContribution:
        tc, _ = transverse_cone(p, f, q)
        face_cone = AffineCone(f.affine_point, Cone(a.dim, tuple(tuple(Fraction(x) for x in r) for r in f.rays)))
        return FaceContribution(f, tc, mu(tc, q, order), integral_germ(face_cone))

    parts = parallel_map(contribution, p.faces)
    logger.info(f"Local EML decomposition over {len(parts)} faces through degree {order}")
    return LocalEMLDecomposition(a, p, tuple(parts), order)
