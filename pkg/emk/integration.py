"""
Integrals over faces of polyhedra.

Exact path: a bounded face is triangulated on its vertices; on each simplex
the polynomial is pulled back to the standard simplex Δ_k, where

    ∫_Δ y^a dy = a_1!···a_k! / (k + |a|)!,

and the result is scaled by the volume of the simplex measured in the
lattice lin(f) ∩ ℤ^d (so a lattice-unimodular simplex has volume 1/k!).

Numeric path: the same triangulation with ``scipy.integrate.nquad`` on each
simplex, for smooth test functions given as callables.

Environment variables:
  EMK_QUAD_TOL – absolute and relative tolerance of the numeric path (default 1e-10)
"""

from __future__ import annotations

import math
import os
from collections.abc import Callable, Sequence
from fractions import Fraction

from loguru import logger
from scipy import integrate

from emk.algebra import Polynomial, Scalar, Vector
from emk.errors import ValidationError
from emk.linalg import lattice_index, transpose
from emk.polyhedra import Face, Polyhedron, triangulate_face

# ── Configuration ────────────────────────────────────
EMK_QUAD_TOL: float = float(os.getenv("EMK_QUAD_TOL", "1e-10"))

Box = tuple[Sequence[Scalar], Sequence[Scalar]]


# ── Exact ────────────────────────────────────────────
def _edges(simplex: Sequence[Vector]) -> list[Vector]:
    apex = simplex[0]
    return [tuple(a - b for a, b in zip(w, apex)) for w in simplex[1:]]


def simplex_volume_factor(simplex: Sequence[Vector]) -> Fraction:
    """|det| of the edge vectors in a ℤ-basis of the lattice of their span."""
    edges = _edges(simplex)
    return lattice_index(edges) if edges else Fraction(1)


def standard_simplex_moment(exponents: Sequence[int]) -> Fraction:
    k = len(exponents)
    numerator = math.prod(math.factorial(a) for a in exponents)
    return Fraction(numerator, math.factorial(k + sum(exponents)))


def simplex_integral(h: Polynomial, simplex: Sequence[Vector]) -> Fraction:
    """∫ h over conv(simplex) with the lattice-normalized measure of its span."""
    simplex = [tuple(Fraction(x) for x in v) for v in simplex]
    if len(simplex) == 1:
        return Fraction(h.evaluate(simplex[0]))
    edges = _edges(simplex)
    pulled = h.compose_affine(transpose(edges), simplex[0])
    total = sum((c * standard_simplex_moment(mono) for mono, c in pulled.terms.items()), Fraction(0))
    return total * simplex_volume_factor(simplex)


def face_integral(p: Polyhedron, f: Face, h: Polynomial) -> Fraction:
    """∫_f h dm_f for a bounded face."""
    if not f.is_bounded:
        logger.error(f"Exact integral requested over unbounded face {f.key}")
        raise ValidationError("Exact face integrals need a bounded face; use the numeric path with a support box")
    return sum((simplex_integral(h, s) for s in triangulate_face(p, f)), Fraction(0))


# ── Numeric ──────────────────────────────────────────
def simplex_integral_numeric(fn: Callable[[Sequence[float]], float], simplex: Sequence[Vector]) -> float:
    points = [[float(x) for x in v] for v in simplex]
    if len(points) == 1:
        return float(fn(points[0]))
    apex = points[0]
    edges = [[a - b for a, b in zip(w, apex)] for w in points[1:]]
    k = len(edges)

    def integrand(*y: float) -> float:
        x = [apex[i] + sum(y[j] * edges[j][i] for j in range(k)) for i in range(len(apex))]
        return float(fn(x))

    ranges = [lambda *outer: (0.0, 1.0 - sum(outer))] * k
    value, _ = integrate.nquad(integrand, ranges, opts={"epsabs": EMK_QUAD_TOL, "epsrel": EMK_QUAD_TOL})
    return value * float(simplex_volume_factor(simplex))


def clipped_face(p: Polyhedron, f: Face, box: Box) -> Polyhedron | None:
    """f ∩ box as a bounded polyhedron, or None when the intersection is empty."""
    d = p.dim_ambient
    rows: list[tuple[Sequence[Scalar], Scalar]] = []
    for i, (a, b) in enumerate(p.inequalities):
        rows.append((a, b))
        if i in f.active:
            rows.append((tuple(-x for x in a), -b))
    lo, hi = box
    for i in range(d):
        unit = tuple(int(i == j) for j in range(d))
        rows.append((unit, Fraction(hi[i])))
        rows.append((tuple(-x for x in unit), -Fraction(lo[i])))
    try:
        return Polyhedron(d, rows)
    except ValidationError:
        return None


def face_integral_numeric(
    p: Polyhedron, f: Face, fn: Callable[[Sequence[float]], float], box: Box
) -> float:
    """∫_f fn dm_f for fn supported in ``box``."""
    region = clipped_face(p, f, box)
    if region is None or region.dimension < f.dim:
        return 0.0
    return sum(simplex_integral_numeric(fn, s) for s in triangulate_face(region, region.faces[-1]))
