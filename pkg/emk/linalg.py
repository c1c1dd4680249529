"""
Exact linear algebra over ℚ and ℤ.

Rational rank, kernels, solves and determinants go through ``sympy.Matrix``.
Integer lattice bookkeeping (saturations, kernels, bases of projected
lattices) uses a row Hermite normal form with its unimodular transform,
computed on Python integers.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from fractions import Fraction

from sympy import Matrix, Rational

from emk.algebra import Scalar, Vector, primitive
from emk.errors import ValidationError

IntVector = tuple[int, ...]


# ── sympy bridge ─────────────────────────────────────
def _to_sympy(x: Scalar) -> Rational:
    x = Fraction(x)
    return Rational(x.numerator, x.denominator)


def _from_sympy(x) -> Fraction:
    x = Rational(x)
    return Fraction(int(x.p), int(x.q))


def to_matrix(rows: Sequence[Sequence[Scalar]], ncols: int | None = None) -> Matrix:
    if not rows:
        return Matrix.zeros(0, ncols or 0)
    return Matrix([[_to_sympy(x) for x in row] for row in rows])


def from_matrix(m: Matrix) -> list[Vector]:
    return [tuple(_from_sympy(m[i, j]) for j in range(m.cols)) for i in range(m.rows)]


# ── Rational linear algebra ──────────────────────────
def rank(rows: Sequence[Sequence[Scalar]]) -> int:
    if not rows:
        return 0
    return to_matrix(rows).rank()


def nullspace(rows: Sequence[Sequence[Scalar]], ncols: int | None = None) -> list[Vector]:
    """Basis of {x : row·x = 0 for every row}."""
    n = len(rows[0]) if rows else ncols
    if n is None:
        raise ValidationError("nullspace of an empty matrix needs a column count")
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    return [tuple(_from_sympy(x) for x in vec) for vec in to_matrix(rows).nullspace()]


def solve(rows: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> Vector | None:
    """The unique solution of rows·x = rhs, or None when there is none or it is not unique."""
    if not rows:
        return None
    a = to_matrix(rows)
    b = Matrix([_to_sympy(x) for x in rhs])
    try:
        sol, params = a.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.shape[0]:
        return None
    return tuple(_from_sympy(x) for x in sol)


def det(rows: Sequence[Sequence[Scalar]]) -> Fraction:
    if not rows:
        return Fraction(1)
    return _from_sympy(to_matrix(rows).det())


def transpose(rows: Sequence[Sequence[Scalar]], nrows_if_empty: int = 0) -> list[Vector]:
    if not rows:
        return [() for _ in range(nrows_if_empty)]
    return [tuple(Fraction(rows[i][j]) for i in range(len(rows))) for j in range(len(rows[0]))]


def mat_vec(matrix: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> Vector:
    return tuple(sum((Fraction(a) * b for a, b in zip(row, v)), Fraction(0)) for row in matrix)


def mat_mul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> list[Vector]:
    bt = transpose(b)
    return [tuple(sum((Fraction(x) * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a]


def coordinates(basis: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> Vector | None:
    """Coefficients c with Σ c_i basis[i] = v, or None if v is outside the span."""
    if not basis:
        return () if not any(Fraction(x) for x in v) else None
    return solve(transpose(basis), v)


def is_independent(vectors: Sequence[Sequence[Scalar]]) -> bool:
    return rank(vectors) == len(vectors)


# ── Hermite normal form ──────────────────────────────
def _extgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with x*a + y*b = g = gcd(a, b) ≥ 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def row_hnf(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style Hermite normal form.

    Returns (H, U) with U unimodular and U·A = H. Non-zero rows of H come
    first, have positive pivots strictly moving right, and entries above a
    pivot are reduced into [0, pivot). Rows of U paired with zero rows of H
    form a ℤ-basis of the integer left kernel of A.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    h = [[int(x) for x in row] for row in rows]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    pivot = 0
    for col in range(n):
        if pivot == m:
            break
        for r in range(pivot + 1, m):
            b = h[r][col]
            if b == 0:
                continue
            a = h[pivot][col]
            g, x, y = _extgcd(a, b)
            ag, bg = a // g, b // g
            for mat in (h, u):
                top, low = mat[pivot], mat[r]
                mat[pivot] = [x * p + y * q for p, q in zip(top, low)]
                mat[r] = [-bg * p + ag * q for p, q in zip(top, low)]
        lead = h[pivot][col]
        if lead == 0:
            continue
        if lead < 0:
            h[pivot] = [-x for x in h[pivot]]
            u[pivot] = [-x for x in u[pivot]]
            lead = -lead
        for r in range(pivot):
            q = h[r][col] // lead
            if q:
                h[r] = [p - q * s for p, s in zip(h[r], h[pivot])]
                u[r] = [p - q * s for p, s in zip(u[r], u[pivot])]
        pivot += 1
    return h, u


def hermite_basis(rows: Sequence[Sequence[int]]) -> list[IntVector]:
    """Non-zero rows of the Hermite normal form: a canonical basis of the row lattice."""
    h, _ = row_hnf(rows)
    return [tuple(r) for r in h if any(r)]


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[IntVector]:
    """ℤ-basis of {x ∈ ℤ^ncols : A x = 0}."""
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    at = [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]
    h, u = row_hnf(at)
    return [tuple(u[i]) for i in range(ncols) if not any(h[i])]


def _integer_rows(vectors: Sequence[Sequence[Scalar]]) -> list[list[int]]:
    out = []
    for v in vectors:
        if any(Fraction(x) for x in v):
            out.append(list(primitive(v)[0]))
    return out


def integer_basis(vectors: Sequence[Sequence[Scalar]], dim: int) -> list[IntVector]:
    """Canonical ℤ-basis of span(vectors) ∩ ℤ^dim, in Hermite normal form."""
    rows = _integer_rows(vectors)
    if not rows:
        return []
    complement = nullspace(rows)
    if not complement:
        return [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    kernel = integer_kernel(_integer_rows(complement), dim)
    return hermite_basis(kernel)


def lattice_basis(generators: Sequence[Sequence[Scalar]], dim: int) -> list[Vector]:
    """ℤ-basis of the lattice generated by rational vectors, in Hermite normal form."""
    gens = [tuple(Fraction(x) for x in g) for g in generators if any(Fraction(x) for x in g)]
    if not gens:
        return []
    den = math.lcm(*(x.denominator for g in gens for x in g))
    rows = [[int(x * den) for x in g] for g in gens]
    return [tuple(Fraction(x, den) for x in row) for row in hermite_basis(rows)]


def sublattice_basis(
    vectors: Sequence[Sequence[Scalar]], lattice: Sequence[Sequence[Scalar]]
) -> list[Vector]:
    """ℤ-basis of span(vectors) ∩ Λ where Λ has basis ``lattice``."""
    coords = []
    for v in vectors:
        c = coordinates(lattice, v)
        if c is None:
            raise ValidationError(f"Vector {v} is outside the lattice span")
        coords.append(c)
    k = len(lattice)
    basis = integer_basis(coords, k)
    return [lattice_point(lattice, b) for b in basis]


def lattice_point(lattice: Sequence[Sequence[Scalar]], coords: Sequence[Scalar]) -> Vector:
    dim = len(lattice[0]) if lattice else 0
    out = [Fraction(0)] * dim
    for c, b in zip(coords, lattice):
        for i in range(dim):
            out[i] += Fraction(c) * b[i]
    return tuple(out)


def lattice_index(vectors: Sequence[Sequence[Scalar]], lattice: Sequence[Sequence[Scalar]] | None = None) -> Fraction:
    """|det| of independent vectors measured in a ℤ-basis of span(vectors) ∩ Λ.

    Λ defaults to ℤ^d. For lattice vectors the result is the index of the
    sublattice they generate.
    """
    if not vectors:
        return Fraction(1)
    dim = len(vectors[0])
    if lattice is None:
        basis: Sequence[Sequence[Scalar]] = integer_basis(vectors, dim)
    else:
        basis = sublattice_basis(vectors, lattice)
    if len(basis) != len(vectors):
        raise ValidationError("Vectors are linearly dependent")
    coords = [coordinates(basis, v) for v in vectors]
    return abs(det(coords))


def in_lattice(lattice: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> bool:
    c = coordinates(lattice, v)
    return c is not None and all(x.denominator == 1 for x in c)
